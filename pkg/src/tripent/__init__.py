"""Unified and genuine tripartite entanglement measures.

Closed-form pure-state measures, convex-roof extensions, monogamy audits and
the state families used to probe them.
"""
from .qcore import (
    DensityOperator,
    InvariantError,
    Ket,
    ParameterError,
    TripentError,
    UsageError,
    partial_trace,
    partial_transpose,
    purify,
    renyi_entropy,
    sqrt_trace,
    tensor,
    trace_norm,
    tsallis_entropy,
    von_neumann_entropy,
)
from .measures import (
    CONCURRENCE,
    EOF,
    GEOMETRIC,
    NEGATIVITY,
    NEGATIVITY_ROOF,
    TANGLE,
    TAU_PRIME,
    THREE_TANGLE,
    MeasureKind,
    check_condition,
    e32_pure,
    geometric_measure_pure,
    measure_pure_bipartite,
    measure_pure_tripartite,
    negativity_mixed,
    renyi,
    three_tangle,
    tsallis,
)
from .convexroof import Ensemble, RoofConfig, RoofResult, convex_roof, hjw_ensemble, wootters_ef
from .monogamy import (
    MonogamyReport,
    additivity_gap,
    audit,
    factorize_pure,
    marginal_compatibility,
    monogamy_exponent,
    purity_inequality,
)
from .states import (
    MemsSpec,
    SpectrumTarget,
    bell,
    classify_mems,
    double_mems,
    generalized_ghz,
    ghz,
    mems,
    mems_extension_pure,
    random_mixed,
    random_pure,
    state_with_spectra,
    w_state,
)

__version__ = "0.1.0"

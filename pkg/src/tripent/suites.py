"""Named verification suites shared by ``tripent verify`` and the acceptance tests.

Every suite is a function ``(seed, workers) -> list[Check]``. Random inputs are
drawn from streams spawned off the master seed, so results depend only on the
seed and never on the parallelism width.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .convexroof import RoofConfig, convex_roof, wootters_ef
from .measures import (
    CONCURRENCE,
    EOF,
    NEGATIVITY,
    NEGATIVITY_ROOF,
    TANGLE,
    TAU_PRIME,
    THREE_TANGLE,
    Condition,
    check_condition,
    measure_pure_bipartite,
    measure_pure_tripartite,
    renyi,
    tsallis,
)
from .monogamy import (
    additivity_gap,
    audit,
    marginal_compatibility,
    monogamy_exponent,
    purity_inequality,
    purity_product_witness,
    sqrt_trace_witness,
)
from .qcore import (
    DensityOperator,
    Ket,
    frobenius_distance,
    partial_trace,
    permute,
    purify,
    spectrum,
    tensor,
)
from .states import (
    MemsClass,
    MemsSpec,
    SpectrumTarget,
    basis_ket,
    bell,
    classify_mems,
    double_mems,
    ghz,
    mems,
    mems_extension_pure,
    random_mixed,
    random_pure,
    state_with_spectra,
    w_state,
)

LN2 = float(np.log(2.0))

SPECTRA_FIRST = SpectrumTarget((327 / 512, 37 / 128, 37 / 512, 0.0), 1 / 8, 1 / 4)
SPECTRA_SECOND = SpectrumTarget((87 / 128, 37 / 128, 1 / 32, 0.0), 1 / 8, 1 / 4)


@dataclass(frozen=True)
class Check:
    """One named comparison. ``relation`` is ``==`` (within tol), ``<=``, ``>=`` or ``<``."""

    name: str
    measured: float
    expected: float
    tol: float = 0.0
    relation: str = "=="

    @property
    def passed(self) -> bool:
        m, e, t = self.measured, self.expected, self.tol
        if not np.isfinite(m):
            return False
        if self.relation == "==":
            return abs(m - e) <= t
        if self.relation == "<=":
            return m <= e + t
        if self.relation == ">=":
            return m >= e - t
        if self.relation == "<":
            return m < e
        raise ValueError(f"unknown relation {self.relation!r}")

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: measured={self.measured:.10g} {self.relation} expected={self.expected:.10g} (tol {self.tol:g})"


def _streams(seed: int, tag: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence([seed, tag]).spawn(n)]


def _flag(ok: bool) -> float:
    return 1.0 if ok else 0.0


# ---------------------------------------------------------------------------


def suite_hierarchy(seed: int = 0, workers: int | None = None, samples: int = 200) -> list[Check]:
    """Hierarchy slack on random pure states for the genuine kinds."""
    checks = []
    kinds = {"eof": EOF, "concurrence": CONCURRENCE, "tangle": TANGLE, "tsallis-2": tsallis(2.0)}
    for tag, dims in enumerate(((2, 2, 2), (2, 2, 4))):
        states = [random_pure(dims, g) for g in _streams(seed, 10 + tag, samples)]
        for label, kind in kinds.items():
            worst = min(check_condition(psi, kind, Condition.HIERARCHY).worst_gap for psi in states)
            checks.append(Check(f"hierarchy {label} {list(dims)} min slack", worst, 0.0, 1e-9, ">="))
    g = check_condition(ghz(), EOF, Condition.HIERARCHY)
    checks.append(Check("hierarchy ghz eof worst gap", g.worst_gap, 0.5 * LN2, 1e-9))
    return checks


def witness_states(seed: int = 0) -> tuple[DensityOperator, DensityOperator]:
    out = []
    for target in (SPECTRA_FIRST, SPECTRA_SECOND):
        rho = state_with_spectra(target, seed=seed)
        if not isinstance(rho, DensityOperator):
            raise RuntimeError(f"spectrum target not realised: {rho}")
        out.append(rho)
    return out[0], out[1]


def suite_counterexample(seed: int = 0, workers: int | None = None) -> list[Check]:
    """The two spectrum-defined two-qubit states and the hierarchy breaks they witness."""
    checks = []
    states = witness_states(seed)
    for name, target, rho in zip(("first", "second"), (SPECTRA_FIRST, SPECTRA_SECOND), states):
        compat = marginal_compatibility(target.joint, target.marginal_a_min, target.marginal_b_min)
        checks.append(Check(f"{name} spectra compatible (min slack)", min(compat.slacks), 0.0, 0.0, ">="))
        spec_err = float(np.max(np.abs(spectrum(rho) - np.array(target.joint))))
        checks.append(Check(f"{name} joint spectrum error", spec_err, 0.0, 1e-12, "<="))
        fit = max(
            abs(spectrum(partial_trace(rho, 0))[-1] - target.marginal_a_min),
            abs(spectrum(partial_trace(rho, 1))[-1] - target.marginal_b_min),
        )
        checks.append(Check(f"{name} marginal fit error", fit, 0.0, 1e-6, "<="))
    first, second = states
    checks.append(Check("first sqrt-trace witness", sqrt_trace_witness(first), 0.0506086, 1e-4))
    checks.append(Check("second sqrt-trace witness", sqrt_trace_witness(second), -0.1593927, 1e-4))
    psi = permute(purify(first), [2, 0, 1])
    rep = check_condition(psi, NEGATIVITY_ROOF, Condition.HIERARCHY)
    checks.append(Check("first negativity-roof hierarchy worst gap", rep.worst_gap, -0.0506086, 1e-4))
    lhs, rhs = purity_product_witness(second)
    checks.append(Check("second tau' witness Tr(B)^2 Tr(C)^2", lhs, 0.4882813, 1e-6))
    checks.append(Check("second tau' witness Tr(BC)^2", rhs, 0.5465088, 1e-6))
    checks.append(Check("second tau' witness lhs < rhs", lhs, rhs, 0.0, "<"))
    return checks


def suite_additivity(seed: int = 0, workers: int | None = None, samples: int = 10) -> list[Check]:
    """EoF additivity when one factor is pure."""
    config = RoofConfig(seed=seed, workers=workers)
    checks = []
    for i, g in enumerate(_streams(seed, 30, samples)):
        rho = random_mixed((2, 2), rank=2 + i % 3, seed=g)
        gap = additivity_gap(rho, bell(), EOF, "bipartite", config)
        checks.append(Check(f"additivity rho[{i:02d}] x bell gap", gap, 0.0, 2e-3))
    checks.append(Check("additivity bell x bell gap", additivity_gap(bell(), bell()), 0.0, 1e-9))
    checks.append(Check("additivity ghz x ghz tripartite gap", additivity_gap(ghz(), ghz(), EOF, "tripartite"), 0.0, 1e-9))
    return checks


_PURITY_DIMS = ((2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (4, 2), (3, 4), (4, 3), (4, 4))


def suite_purity_lemma(seed: int = 0, workers: int | None = None, samples: int = 1000) -> list[Check]:
    """``1 + max(P_A, P_B) P_AB >= P_A + P_B`` and its equality case."""
    slacks, sums, false_eq = [], [], 0
    for i, g in enumerate(_streams(seed, 40, samples)):
        dims = _PURITY_DIMS[i % len(_PURITY_DIMS)]
        rho = random_mixed(dims, rank=1 + int(g.integers(dims[0] * dims[1])), seed=g)
        rep = purity_inequality(rho)
        slacks.append(rep.slack)
        sums.append(rep.strict_slack)
        false_eq += rep.equality_case
    checks = [
        Check(f"purity lemma min slack ({samples} states)", min(slacks), 0.0, 1e-9, ">="),
        Check(f"purity sum bound min slack ({samples} states)", min(sums), 0.0, 1e-9, ">="),
        Check("purity lemma equality on random states (count)", float(false_eq), 0.0, 0.0),
    ]
    eq_dev, eq_ok = 0.0, True
    for i, g in enumerate(_streams(seed, 41, 20)):
        da, db = _PURITY_DIMS[i % len(_PURITY_DIMS)]
        mixed = random_mixed((da,), rank=da, seed=g)
        pure = random_pure((db,), g).density()
        rho = tensor(mixed, pure) if i % 2 == 0 else tensor(pure, mixed)
        rep = purity_inequality(rho)
        eq_dev = max(eq_dev, abs(rep.strict_slack), abs(rep.slack))
        eq_ok &= rep.equality_case and rep.structural
    checks.append(Check("purity lemma equality case slack", eq_dev, 0.0, 1e-12, "<="))
    checks.append(Check("purity lemma equality case detected", _flag(eq_ok), 1.0))
    rep = purity_inequality(bell())
    checks.append(Check("purity lemma bell slack", rep.slack, 0.5, 1e-12))
    checks.append(Check("purity lemma bell strict slack", rep.strict_slack, 1.0, 1e-12))
    return checks


def suite_mems_story(seed: int = 0, workers: int | None = None) -> list[Check]:
    """Bipartite MEMS that look shareable, for m = r = l = 2."""
    config = RoofConfig(seed=seed, workers=workers)
    tol = 2e-2
    checks = []
    for tag, l in (("pure", 1), ("mixed", 2)):
        # parties stored as (B, A, C)
        rep = audit(double_mems(2, 2, l), EOF, 1.0, config, labels="BAC")
        p, c, t = rep.pair_values, rep.cut_values, rep.tripartite_value
        dev = max(abs(c["A|BC"] - p["AB"]), abs(p["AC"]))
        checks.append(Check(f"mems-story {tag} E(A|BC)=E(AB), E(AC)=0", dev, 0.0, tol, "<="))
        checks.append(Check(f"mems-story {tag} E(B|AC)=E(AB)+E(BC)", c["B|AC"], p["AB"] + p["BC"], tol))
        dev = max(abs(c["C|AB"] - p["BC"]), abs(p["AC"]))
        checks.append(Check(f"mems-story {tag} E(C|AB)=E(BC), E(AC)=0", dev, 0.0, tol, "<="))
        checks.append(Check(f"mems-story {tag} E3=E(AB)+E(BC)", t, p["AB"] + p["BC"], tol))
        checks.append(Check(f"mems-story {tag} E3 = ln(mr)", t, np.log(4.0), tol))
        checks.append(Check(f"mems-story {tag} E(AB) = ln m", p["AB"], LN2, tol))
        checks.append(Check(f"mems-story {tag} E3 > E(AB)", p["AB"], t, 0.0, "<"))
        checks.append(Check(f"mems-story {tag} complete gap", rep.complete_gap, 0.0, tol))
        flags = rep.disentangling_flags
        checks.append(Check(f"mems-story {tag} AB and BC flags", _flag(flags["A|BC=AB"] and flags["C|AB=BC"]), 1.0))
        if tag == "mixed":
            rho = double_mems(2, 2, l)
            v = classify_mems(partial_trace(rho, [0, 1]))
            checks.append(Check("mems-story BA pair is MEMS up to B", _flag(v.label is MemsClass.UP_TO_B), 1.0))
            # B splits as (B2, B1) with B1 fastest; the B2:C pair carries the second MEMS
            split = DensityOperator(rho.matrix, (2, 2, 2, 4))
            v = classify_mems(partial_trace(split, [0, 3]))
            checks.append(Check("mems-story B2C pair is MEMS up to B", _flag(v.label is MemsClass.UP_TO_B), 1.0))
    for probs, want in (((0.5, 0.5), MemsClass.UP_TO_B), ((0.7, 0.3), MemsClass.UP_TO_A)):
        spec = MemsSpec(2, 2, probs)
        v = classify_mems(mems(spec))
        checks.append(Check(f"mems-story classify {probs} is {want.value}", _flag(v.label is want), 1.0))
        ext = mems_extension_pure(spec)
        rho_ac = partial_trace(ext, [0, 2])
        dev = frobenius_distance(rho_ac.matrix, np.kron(partial_trace(ext, 0).matrix, partial_trace(ext, 2).matrix))
        checks.append(Check(f"mems-story extension {probs} rho_AC product", dev, 0.0, 1e-12, "<="))
        dev = frobenius_distance(partial_trace(ext, [0, 1]).matrix, mems(spec).matrix)
        checks.append(Check(f"mems-story extension {probs} traces to mems", dev, 0.0, 1e-12, "<="))
    return checks


def suite_oracle(seed: int = 0, workers: int | None = None, samples: int = 50) -> list[Check]:
    """Convex-roof EoF against the two-qubit closed form."""
    config = RoofConfig(seed=seed, workers=workers)
    checks = []
    for i, g in enumerate(_streams(seed, 50, samples)):
        rho = random_mixed((2, 2), rank=1 + i % 4, seed=g)
        roof = convex_roof(rho, EOF, "bipartite", "min", config).value
        checks.append(Check(f"oracle rho[{i:02d}] roof - wootters", roof - wootters_ef(rho)[1], 0.0, 1e-3))
    return checks


def suite_closed_forms(seed: int = 0, workers: int | None = None) -> list[Check]:
    """Spot values of the pure-state formulas."""
    g, w = ghz(), w_state()
    checks = [
        Check("closed-form ghz eof", measure_pure_tripartite(g, EOF), 1.5 * LN2, 1e-9),
        Check("closed-form ghz tangle", measure_pure_tripartite(g, TANGLE), 1.5, 1e-9),
        Check("closed-form ghz concurrence", measure_pure_tripartite(g, CONCURRENCE), np.sqrt(1.5), 1e-9),
        Check("closed-form ghz negativity", measure_pure_tripartite(g, NEGATIVITY), 3.0, 1e-9),
        Check("closed-form ghz tsallis-2", measure_pure_tripartite(g, tsallis(2.0)), 0.75, 1e-9),
        Check("closed-form w tangle", measure_pure_tripartite(w, TANGLE), 4 / 3, 1e-9),
        Check("closed-form w three-tangle", measure_pure_tripartite(w, THREE_TANGLE), 0.0, 1e-6),
    ]
    prod_state = tensor(bell(), basis_ket([0], [2]))
    kinds = {
        "eof": EOF, "concurrence": CONCURRENCE, "tangle": TANGLE, "tsallis-2": tsallis(2.0),
        "renyi-0.5": renyi(0.5), "negativity": NEGATIVITY, "negativity-roof": NEGATIVITY_ROOF,
        "tau-prime": TAU_PRIME,
    }
    for label, kind in kinds.items():
        three = measure_pure_tripartite(prod_state, kind)
        two = measure_pure_bipartite(bell(), kind.bipartite_counterpart)
        checks.append(Check(f"closed-form bell x |0> {label} matches bell", three, two, 1e-9))
    return checks


def suite_monogamy(seed: int = 0, workers: int | None = None, samples: int = 100) -> list[Check]:
    """Complete-monogamy audits: the CKW-tight W state, GHZ, and random samples."""
    config = RoofConfig(seed=seed, workers=workers)
    wrep = audit(w_state(), TANGLE, 1.0, config)
    grep = audit(ghz(), TANGLE, 1.0, config)
    states = [random_pure((2, 2, 2), g) for g in _streams(seed, 60, samples)]
    est = monogamy_exponent(states, TANGLE, 1e-6, config)
    west = monogamy_exponent([w_state()], TANGLE, 1e-6, config)
    return [
        Check("monogamy w tangle complete gap", wrep.complete_gap, 0.0, 2e-3),
        Check("monogamy ghz tangle complete gap", grep.complete_gap, 1.5, 2e-3),
        Check(f"monogamy random [2,2,2] violations ({samples} states)", float(est.violations), 0.0),
        Check("monogamy w tangle exponent", west.alpha_star, 1.0, 1e-3),
    ]


def _tight_states(seed: int, n: int) -> list[Ket]:
    out = []
    for i, g in enumerate(_streams(seed, 70, n)):
        pure_one = random_pure((2,), g)
        pair = random_pure((2, 2), g)
        if i % 2 == 0:  # rho_B pure: |phi>^{AC} |b>^B
            out.append(permute(tensor(pair, pure_one), [0, 2, 1]))
        else:  # rho_C pure: |phi>^{AB} |c>^C
            out.append(tensor(pair, pure_one))
    return out


def suite_tight_monogamy(seed: int = 0, workers: int | None = None, samples: int = 50) -> list[Check]:
    """E3 = E(A|BC) forces a separable BC pair."""
    config = RoofConfig(seed=seed, workers=workers)
    kinds = {"eof": EOF, "tangle": TANGLE, "concurrence": CONCURRENCE, "tsallis-2": tsallis(2.0)}
    checks = []
    states = _tight_states(seed, samples)
    for label, kind in kinds.items():
        premise, pair_max = 0.0, 0.0
        for psi in states:
            e3 = measure_pure_tripartite(psi, kind)
            cut = measure_pure_bipartite(psi, kind, "A|BC")
            premise = max(premise, e3 - cut)
            pair_max = max(pair_max, convex_roof(partial_trace(psi, [1, 2]), kind, config=config).value)
        checks.append(Check(f"tight {label} E3 - E(A|BC)", premise, 0.0, 1e-8, "<="))
        checks.append(Check(f"tight {label} max BC pair", pair_max, 0.0, 1e-4, "<="))
    return checks


SUITES: dict[str, Callable[..., list[Check]]] = {
    "hierarchy": suite_hierarchy,
    "counterexample": suite_counterexample,
    "additivity": suite_additivity,
    "purity-lemma": suite_purity_lemma,
    "mems-story": suite_mems_story,
    "oracle": suite_oracle,
    "closed-forms": suite_closed_forms,
    "monogamy": suite_monogamy,
    "tight-monogamy": suite_tight_monogamy,
}


def run_suite(name: str, seed: int = 0, workers: int | None = None) -> list[Check]:
    """Run a suite and return its checks sorted by name."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return sorted(fn(seed=seed, workers=workers), key=lambda c: c.name)

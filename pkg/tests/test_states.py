import numpy as np
import pytest

from tripent.measures import negativity_mixed
from tripent.qcore import DensityOperator, UsageError, partial_trace, purity, spectrum, tensor
from tripent.states import (
    Infeasible,
    MemsClass,
    MemsSpec,
    NotFound,
    SpectrumTarget,
    basis_ket,
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

from tripent.qcore import merge, permute


def test_named_states():
    np.testing.assert_allclose(ghz().amplitudes[[0, 7]], [2**-0.5] * 2)
    np.testing.assert_allclose(w_state().amplitudes[[1, 2, 4]], [3**-0.5] * 3)
    assert ghz(3, 2).dims == (3, 3)
    for name in ("phi+", "phi-", "psi+", "psi-"):
        np.testing.assert_allclose(spectrum(partial_trace(bell(name), 0)), [0.5, 0.5])
    with pytest.raises(UsageError):
        bell("omega")


def test_generalized_ghz_normalisation():
    psi = generalized_ghz([0.6, 0.8])
    np.testing.assert_allclose(psi.amplitudes[[0, 7]], [0.6, 0.8])
    with pytest.raises(Exception):
        generalized_ghz([0.5, 0.5])


def test_random_states_are_reproducible():
    a = random_mixed((2, 3), rank=2, seed=9)
    b = random_mixed((2, 3), rank=2, seed=9)
    np.testing.assert_array_equal(a.matrix, b.matrix)
    np.testing.assert_array_equal(random_pure((2, 2, 2), seed=1).amplitudes, random_pure((2, 2, 2), seed=1).amplitudes)


# ---------------------------------------------------------------------------
# MEMS


@pytest.mark.parametrize("m,probs", [(2, [0.5, 0.5]), (2, [0.7, 0.3]), (3, [0.2, 0.3, 0.5]), (3, [1.0])])
def test_mems_invariants(m, probs):
    spec = MemsSpec(m, len(probs), probs)
    psi = mems_extension_pure(spec)
    rho = mems(spec)
    np.testing.assert_allclose(partial_trace(rho, 0).matrix, np.eye(m) / m, atol=1e-12)
    if len(probs) > 1:
        # tracing the extension's C party gives back the mixed state
        np.testing.assert_allclose(partial_trace(psi, [0, 1]).matrix, rho.matrix, atol=1e-12)
        np.testing.assert_allclose(spectrum(rho)[: len(probs)], sorted(probs, reverse=True), atol=1e-12)
        # A and C share no correlations
        ac = partial_trace(psi, [0, 2])
        np.testing.assert_allclose(
            ac.matrix, np.kron(partial_trace(psi, 0).matrix, partial_trace(psi, 2).matrix), atol=1e-12
        )


def test_mems_prunes_zero_branches():
    rho = mems(MemsSpec(2, 3, [0.5, 0.0, 0.5]))
    assert rho.dims == (2, 4)
    assert classify_mems(rho).label is MemsClass.UP_TO_B
    pure = mems(MemsSpec(2, 2, [1.0, 0.0]))
    assert pure.dims == (2, 2)
    assert classify_mems(pure).label is MemsClass.PURE_MES


def test_mems_spec_validation():
    with pytest.raises(UsageError):
        MemsSpec(1, 2)
    with pytest.raises(UsageError):
        MemsSpec(2, 2, [0.6, 0.6])
    with pytest.raises(UsageError):
        MemsSpec(2, 3, [0.5, 0.5])


def test_classify_mems_labels():
    assert classify_mems(bell()).label is MemsClass.PURE_MES
    assert classify_mems(mems(MemsSpec(2, 2, [0.8, 0.2]))).label is MemsClass.UP_TO_A
    assert classify_mems(mems(MemsSpec(2, 3))).label is MemsClass.UP_TO_B
    v = classify_mems(random_mixed((2, 4), rank=2, seed=0))
    assert v.label is MemsClass.NOT_MEMS
    assert v.evidence["marginal_deviation"] > 1e-8


@pytest.mark.parametrize("r", [2, 3])
def test_mixed_mems_never_genuine(r):
    v = classify_mems(mems(MemsSpec(2, r)))
    assert not v.genuine
    assert v.evidence["genuine"] == "pure-only"


def test_classify_swaps_to_smaller_first_party():
    rho = mems(MemsSpec(2, 2, [0.6, 0.4]))
    swapped = permute(rho, [1, 0])
    v = classify_mems(swapped)
    assert v.evidence["swapped"]
    assert v.label is MemsClass.UP_TO_A


def test_classify_rejects_maximally_mixed_marginal_without_structure():
    # A maximally mixed, B too small for a maximally entangled factor
    rho = DensityOperator(np.eye(4) / 4, (2, 2))
    v = classify_mems(rho)
    assert v.label is MemsClass.NOT_MEMS


def test_classify_on_a_cut():
    psi = tensor(bell(), basis_ket([0], [2]))
    assert classify_mems(psi, "A|BC").label is MemsClass.PURE_MES


def test_double_mems_structure():
    rho = double_mems(2, 2, 2)  # parties (B, A, C)
    assert rho.dims == (4, 2, 4)
    assert np.trace(rho.matrix).real == pytest.approx(1.0)
    # A and C are uncorrelated
    ac = partial_trace(rho, [1, 2])
    np.testing.assert_allclose(
        ac.matrix, np.kron(partial_trace(rho, 1).matrix, partial_trace(rho, 2).matrix), atol=1e-12
    )
    # B and C share the branch label
    bc = partial_trace(rho, [0, 2])
    assert negativity_mixed(bc) > 0.1
    ab = partial_trace(rho, [0, 1])
    assert classify_mems(permute(ab, [1, 0])).label is MemsClass.UP_TO_B


def test_double_mems_bc_pair_is_mems():
    rho = double_mems(2, 2, 2)
    bc = partial_trace(rho, [0, 2])
    # B = (B2, B1) with the branch register B2 outermost; drop B1
    t = bc.matrix.reshape(2, 2, 4, 2, 2, 4)
    b2c = np.einsum("abcdbf->acdf", t).reshape(8, 8)
    v = classify_mems(DensityOperator(b2c, (2, 4)))
    assert v.label is MemsClass.UP_TO_B


def test_double_mems_pure_when_l_is_one():
    rho = double_mems(2, 2, 1)
    assert purity(rho) == pytest.approx(1.0)


def test_double_mems_guard():
    with pytest.raises(UsageError):
        double_mems(3, 3, 3)


# ---------------------------------------------------------------------------
# prescribed spectra


def test_state_with_spectra_hits_targets():
    target = SpectrumTarget([327 / 512, 37 / 128, 37 / 512, 0], 1 / 8, 1 / 4)
    rho = state_with_spectra(target, seed=0)
    assert isinstance(rho, DensityOperator)
    np.testing.assert_allclose(spectrum(rho), target.joint, atol=1e-9)
    assert spectrum(partial_trace(rho, 0))[-1] == pytest.approx(1 / 8, abs=1e-8)
    assert spectrum(partial_trace(rho, 1))[-1] == pytest.approx(1 / 4, abs=1e-8)


def test_state_with_spectra_is_deterministic():
    target = SpectrumTarget([0.5, 0.3, 0.2, 0.0], 0.2, 0.3)
    a = state_with_spectra(target, seed=4)
    b = state_with_spectra(target, seed=4)
    np.testing.assert_array_equal(a.matrix, b.matrix)


def test_state_with_spectra_infeasible():
    res = state_with_spectra(SpectrumTarget([0.25] * 4, 0.0, 0.5))
    assert isinstance(res, Infeasible)
    assert not res.found
    assert len(res.failing) >= 1


def test_state_with_spectra_budget_exhausted():
    res = state_with_spectra(SpectrumTarget([0.5, 0.3, 0.2, 0.0], 0.2, 0.3), max_iters=1, restarts=1)
    assert isinstance(res, NotFound)
    assert res.best_residual > 1e-8


def test_merge_of_extension_reproduces_bipartite_view():
    psi = mems_extension_pure(MemsSpec(2, 2, [0.5, 0.5]))
    m = merge(psi, [[0], [1, 2]])
    assert m.dims == (2, 8)

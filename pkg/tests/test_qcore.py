import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripent.qcore import (
    DensityOperator,
    InvariantError,
    Ket,
    ParameterError,
    UsageError,
    clamp_eigenvalues,
    local_unitary,
    merge,
    partial_trace,
    partial_transpose,
    permute,
    purify,
    purity,
    random_unitary,
    rank,
    renyi_entropy,
    spectrum,
    sqrt_trace,
    tensor,
    trace_norm,
    tsallis_entropy,
    von_neumann_entropy,
)
from tripent.states import bell, ghz, random_mixed, random_pure


def _loop_partial_trace(rho, dims, keep):
    """Reference partial trace by explicit index summation."""
    n = len(dims)
    traced = [k for k in range(n) if k not in keep]
    kd = [dims[k] for k in keep]
    out = np.zeros((int(np.prod(kd)),) * 2, dtype=complex)
    t = rho.reshape(tuple(dims) * 2)
    for idx in np.ndindex(*kd):
        for jdx in np.ndindex(*kd):
            acc = 0
            for tr in np.ndindex(*[dims[k] for k in traced]):
                row, col = [0] * n, [0] * n
                for pos, k in enumerate(keep):
                    row[k], col[k] = idx[pos], jdx[pos]
                for pos, k in enumerate(traced):
                    row[k] = col[k] = tr[pos]
                acc += t[tuple(row) + tuple(col)]
            out[np.ravel_multi_index(idx, kd), np.ravel_multi_index(jdx, kd)] = acc
    return out


def test_ket_requires_unit_norm():
    with pytest.raises(InvariantError):
        Ket([1, 1], (2,))
    psi = Ket([3, 4], (2,), normalize=True)
    np.testing.assert_allclose(psi.amplitudes, [0.6, 0.8])


def test_dims_must_match_size():
    with pytest.raises(UsageError):
        Ket([1, 0, 0, 0], (2, 3))


def test_ket_is_read_only():
    psi = bell()
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0


def test_density_validation():
    with pytest.raises(InvariantError):
        DensityOperator([[0.5, 0.1], [0.0, 0.5]])
    with pytest.raises(InvariantError):
        DensityOperator(np.eye(2))
    with pytest.raises(InvariantError):
        DensityOperator(np.diag([1.5, -0.5]))


def test_tiny_negative_eigenvalues_are_clamped():
    np.testing.assert_allclose(clamp_eigenvalues(np.array([0.6, 0.4, -5e-10])), [0.6, 0.4, 0.0])
    with pytest.raises(InvariantError):
        clamp_eigenvalues(np.array([1.0, -1e-6]))


@pytest.mark.parametrize("keep", [[0], [1], [2], [0, 2], [1, 2], [2, 0]])
def test_partial_trace_matches_index_sum(keep):
    rho = random_mixed((2, 3, 2), rank=3, seed=7)
    got = partial_trace(rho, keep).matrix
    want = _loop_partial_trace(rho.matrix, rho.dims, sorted(keep))
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_partial_trace_of_ket_equals_density_route():
    psi = random_pure((2, 3, 4), seed=1)
    for keep in ([0], [1, 2], [0, 2]):
        np.testing.assert_allclose(
            partial_trace(psi, keep).matrix, partial_trace(psi.density(), keep).matrix, atol=1e-12
        )


def test_ghz_marginals_maximally_mixed():
    for k in range(3):
        np.testing.assert_allclose(partial_trace(ghz(), k).matrix, np.eye(2) / 2, atol=1e-12)


def test_permute_and_merge():
    a, b = random_pure((2,), seed=1), random_pure((3,), seed=2)
    ab = tensor(a, b)
    ba = permute(ab, [1, 0])
    np.testing.assert_allclose(ba.amplitudes, tensor(b, a).amplitudes, atol=1e-12)
    m = merge(random_pure((2, 3, 2), seed=3), [[1], [0, 2]])
    assert m.dims == (3, 4)
    with pytest.raises(UsageError):
        merge(ab, [[0], [0, 1]])


def test_partial_transpose_bell():
    pt = partial_transpose(bell(), 1)
    want = 0.5 * np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    np.testing.assert_allclose(pt, want, atol=1e-15)
    assert trace_norm(pt) == pytest.approx(2.0)


def test_entropies_on_known_spectrum():
    rho = DensityOperator(np.diag([0.5, 0.25, 0.25]))
    assert von_neumann_entropy(rho) == pytest.approx(1.5 * np.log(2))
    assert tsallis_entropy(rho, 2) == pytest.approx(1 - 0.375)
    assert renyi_entropy(rho, 0.5) == pytest.approx(2 * np.log(np.sqrt(0.5) + 2 * 0.5))
    assert sqrt_trace(rho) == pytest.approx(np.sqrt(0.5) + 1.0)
    assert purity(rho) == pytest.approx(0.375)


def test_entropy_parameter_errors():
    rho = DensityOperator(np.eye(2) / 2)
    with pytest.raises(ParameterError):
        tsallis_entropy(rho, 1.0)
    with pytest.raises(ParameterError):
        tsallis_entropy(rho, -1.0)
    with pytest.raises(ParameterError):
        renyi_entropy(rho, 1.5)


def test_tsallis_tends_to_von_neumann():
    rho = random_mixed((3,), rank=3, seed=5)
    assert tsallis_entropy(rho, 1 + 1e-7) == pytest.approx(von_neumann_entropy(rho), abs=1e-6)


def test_purify_reproduces_state():
    rho = random_mixed((2, 3), rank=4, seed=11)
    psi = purify(rho)
    assert psi.dims == (2, 3, 4)
    np.testing.assert_allclose(partial_trace(psi, [0, 1]).matrix, rho.matrix, atol=1e-12)


def test_local_unitary_keeps_spectra():
    rng = np.random.default_rng(0)
    psi = random_pure((2, 2, 3), seed=4)
    phi = local_unitary(psi, [random_unitary(d, rng) for d in psi.dims])
    for k in range(3):
        np.testing.assert_allclose(spectrum(partial_trace(phi, k)), spectrum(partial_trace(psi, k)), atol=1e-12)


def test_random_unitary_is_unitary():
    u = random_unitary(5, np.random.default_rng(3))
    np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    da=st.integers(1, 3),
    db=st.integers(1, 3),
    r=st.integers(1, 9),
    seed=st.integers(0, 2**31 - 1),
)
def test_partial_trace_is_a_state(da, db, r, seed):
    r = min(r, da * db)
    rho = random_mixed((da, db), rank=r, seed=seed)
    assert rank(rho) == r
    for k in (0, 1):
        red = partial_trace(rho, k)
        assert np.trace(red.matrix).real == pytest.approx(1.0)
        assert np.linalg.eigvalsh(red.matrix)[0] > -1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_pure_state_marginals_share_spectrum(seed):
    psi = random_pure((2, 3), seed=seed)
    a = spectrum(partial_trace(psi, 0))
    b = spectrum(partial_trace(psi, 1))
    np.testing.assert_allclose(a, b[:2], atol=1e-10)

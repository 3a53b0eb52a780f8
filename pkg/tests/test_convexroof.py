import numpy as np
import pytest

from tripent.convexroof import (
    Ensemble,
    RoofConfig,
    _Objective,
    _project,
    _retract,
    binary_entropy,
    convex_roof,
    hjw_ensemble,
    wootters_concurrence,
    wootters_ef,
)
from tripent.measures import CONCURRENCE, EOF, GEOMETRIC, NEGATIVITY, NEGATIVITY_ROOF, TANGLE, KindError, renyi, tsallis
from tripent.qcore import DensityOperator, UsageError, as_density, partial_trace, random_unitary
from tripent.states import bell, ghz, random_mixed, random_pure, w_state

FAST = RoofConfig(restarts=6)


def werner(p):
    return DensityOperator(p * bell("psi-").density().matrix + (1 - p) * np.eye(4) / 4, (2, 2))


def isotropic_concurrence(p):
    # Werner state with singlet weight p: C = max(0, (3p - 1)/2)
    return max(0.0, 1.5 * p - 0.5)


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 0.8, 1.0])
def test_wootters_on_werner_states(p):
    assert wootters_concurrence(werner(p)) == pytest.approx(isotropic_concurrence(p), abs=1e-12)


def test_wootters_pure_state_matches_entropy():
    psi = random_pure((2, 2), seed=3)
    c, eof = wootters_ef(psi.density())
    a = psi.tensor_view()
    assert c == pytest.approx(2 * abs(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]), abs=1e-12)
    nu = np.linalg.eigvalsh(partial_trace(psi, 0).matrix)
    assert eof == pytest.approx(-np.sum(nu * np.log(nu)), abs=1e-10)


def test_binary_entropy_edges():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(np.log(2))


def test_wootters_rejects_other_dims():
    with pytest.raises(UsageError):
        wootters_concurrence(random_mixed((2, 3), 2, seed=0))


def test_hjw_ensemble_reproduces_state():
    rho = random_mixed((2, 3), rank=3, seed=2)
    rng = np.random.default_rng(0)
    ens = hjw_ensemble(rho, rng.standard_normal(25), 5)
    assert isinstance(ens, Ensemble)
    assert len(ens) <= 5
    np.testing.assert_allclose(ens.density(), rho.matrix, atol=1e-12)
    assert ens.weights.sum() == pytest.approx(1.0)


def test_hjw_requires_enough_members():
    rho = random_mixed((2, 2), rank=3, seed=2)
    with pytest.raises(UsageError):
        hjw_ensemble(rho, np.zeros(4), 2)


@pytest.mark.parametrize(
    "kind,scope,dims,r",
    [
        (EOF, "bipartite", (2, 3), 3),
        (TANGLE, "bipartite", (2, 2), 2),
        (CONCURRENCE, "bipartite", (2, 2), 3),
        (tsallis(2.5), "bipartite", (3, 2), 2),
        (renyi(0.5), "bipartite", (2, 2), 2),
        (NEGATIVITY_ROOF, "bipartite", (2, 2), 2),
        (EOF, "tripartite", (2, 2, 2), 2),
        (CONCURRENCE, "tripartite", (2, 2, 2), 3),
        (tsallis(2.0), "tripartite", (2, 2, 2), 2),
    ],
    ids=lambda x: getattr(x, "label", str(x)),
)
def test_objective_gradient_matches_finite_differences(kind, scope, dims, r):
    rho = random_mixed(dims, rank=r, seed=5)
    obj = _Objective(rho, kind, scope)
    rng = np.random.default_rng(1)
    n = r + 2
    v = random_unitary(n, rng)[:, :r]
    f0, g = obj(v)
    xi = _project(v, rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r)))
    h = 1e-6
    fd = (obj(_retract(v, h * xi), grad=False) - obj(_retract(v, -h * xi), grad=False)) / (2 * h)
    analytic = 2 * np.real(np.vdot(g, xi))
    assert analytic == pytest.approx(fd, rel=1e-5, abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_roof_eof_matches_wootters(seed):
    rho = random_mixed((2, 2), rank=1 + seed % 4, seed=seed)
    res = convex_roof(rho, EOF, config=FAST)
    assert res.value == pytest.approx(wootters_ef(rho)[1], abs=1e-6)
    np.testing.assert_allclose(res.ensemble.density(), rho.matrix, atol=1e-10)
    assert res.ensemble.average(EOF, "bipartite") == pytest.approx(res.value, abs=1e-10)


def test_roof_tangle_equals_concurrence_squared_rank_two():
    rho = random_mixed((2, 2), rank=2, seed=8)
    res = convex_roof(rho, TANGLE, config=FAST)
    assert res.value == pytest.approx(wootters_concurrence(rho) ** 2, abs=1e-6)


@pytest.mark.parametrize("p", [0.2, 1 / 3])
def test_roof_vanishes_on_separable_werner(p):
    assert convex_roof(werner(p), EOF, config=FAST).value == pytest.approx(0.0, abs=1e-6)


def test_w_pair_tangle():
    rho = partial_trace(w_state(), [0, 1])
    assert convex_roof(rho, TANGLE, config=FAST).value == pytest.approx(4 / 9, abs=1e-6)


def test_ghz_pair_is_separable():
    rho = partial_trace(ghz(), [0, 1])
    assert convex_roof(rho, EOF, config=FAST).value == pytest.approx(0.0, abs=1e-8)


def test_max_direction_bounds_min():
    rho = random_mixed((2, 2), rank=2, seed=4)
    lo = convex_roof(rho, EOF, "bipartite", "min", FAST).value
    hi = convex_roof(rho, EOF, "bipartite", "max", FAST).value
    assert hi >= lo
    assert hi <= np.log(2) + 1e-12


def test_pure_input_short_circuits():
    res = convex_roof(bell().density(), EOF)
    assert res.value == pytest.approx(np.log(2))
    assert len(res.ensemble) == 1
    assert res.converged


def test_tripartite_roof_on_pure_mixture_bounds():
    rho = DensityOperator(0.5 * ghz().density().matrix + 0.5 * w_state().density().matrix, (2, 2, 2))
    res = convex_roof(rho, EOF, "tripartite", config=FAST)
    assert 0 < res.value <= 1.5 * np.log(2)


def test_cut_selection_on_three_parties():
    rho = as_density(random_pure((2, 2, 2), seed=1))
    res = convex_roof(rho, EOF, "bipartite", cut="A|BC")
    nu = np.linalg.eigvalsh(partial_trace(rho, 0).matrix)
    assert res.value == pytest.approx(-np.sum(nu * np.log(nu)), abs=1e-10)


def test_roof_errors():
    rho = random_mixed((2, 2), rank=2, seed=0)
    with pytest.raises(KindError):
        convex_roof(rho, NEGATIVITY)
    with pytest.raises(UsageError):
        convex_roof(rho, EOF, direction="sideways")
    with pytest.raises(UsageError):
        convex_roof(rho, EOF, config=RoofConfig(ensemble_size=1))
    with pytest.raises(KindError):
        convex_roof(random_mixed((2, 2, 2), 2, seed=0), GEOMETRIC, "tripartite")


def test_roof_is_deterministic_across_workers():
    rho = random_mixed((2, 3), rank=3, seed=12)
    a = convex_roof(rho, EOF, config=RoofConfig(restarts=4, seed=3, workers=1))
    b = convex_roof(rho, EOF, config=RoofConfig(restarts=4, seed=3, workers=3))
    assert a.value == b.value
    assert a.restart_values == b.restart_values


def test_workers_env_default(monkeypatch):
    monkeypatch.setenv("TRIPENT_WORKERS", "2")
    rho = random_mixed((2, 2), rank=2, seed=1)
    a = convex_roof(rho, EOF, config=RoofConfig(restarts=3))
    monkeypatch.delenv("TRIPENT_WORKERS")
    b = convex_roof(rho, EOF, config=RoofConfig(restarts=3))
    assert a.value == b.value


def test_config_validation():
    with pytest.raises(UsageError):
        RoofConfig(restarts=0)
    with pytest.raises(UsageError):
        RoofConfig(rel_tol=0)

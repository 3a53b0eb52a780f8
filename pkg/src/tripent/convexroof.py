"""Convex-roof extensions by optimisation over pure-state decompositions.

Every size-``n`` decomposition of a rank-``r`` state ``rho = sum_j l_j |e_j><e_j|``
is ``|psi_i~> = sum_j V_ij sqrt(l_j) |e_j>`` for an ``n x r`` isometry ``V``
(``V^dag V = 1``). The roof is the extremum of ``sum_i p_i E(psi_i)`` over that
Stiefel manifold. The objective is differentiated analytically through the
marginal spectra and minimised (or maximised) by Riemannian conjugate gradient
with a polar retraction and Armijo backtracking.

Results for ``direction="min"`` are variational: they bound the true roof from
above.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .measures import (
    Kind,
    KindError,
    MeasureKind,
    bipartite_view,
    measure_pure,
    party_term,
    party_term_grad,
    spectral_coefficients,
)
from .qcore import (
    RANK_TOL,
    DensityOperator,
    Ket,
    State,
    UsageError,
    as_density,
    clamp_eigenvalues,
    random_unitary,
)

WORKERS_ENV = "TRIPENT_WORKERS"
MAX_ENSEMBLE = 16
WEIGHT_FLOOR = 1e-12


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Ensemble:
    """Pure-state decomposition ``sum_i w_i |psi_i><psi_i|``."""

    weights: np.ndarray
    states: tuple[Ket, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.states) or len(w) == 0:
            raise UsageError("ensemble needs one weight per state")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-9:
            raise UsageError(f"weights must be positive and sum to 1 (sum={w.sum()!r})")
        if len({s.dims for s in self.states}) != 1:
            raise UsageError("ensemble members must share dims")
        object.__setattr__(self, "weights", w)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.states[0].dims

    def density(self) -> np.ndarray:
        return sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in zip(self.weights, self.states))

    def average(self, kind: MeasureKind, scope: str = "auto", cut=None) -> float:
        return float(sum(w * measure_pure(s, kind, scope, cut) for w, s in zip(self.weights, self.states)))

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class RoofConfig:
    ensemble_size: int | None = None
    restarts: int = 16
    max_iters: int = 400
    rel_tol: float = 1e-7
    seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or self.rel_tol <= 0:
            raise UsageError("restarts, max_iters and rel_tol must be positive")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise UsageError("ensemble_size must be positive")


@dataclass(frozen=True)
class RoofResult:
    value: float
    ensemble: Ensemble
    direction: str
    converged: bool
    restart_spread: float
    restart_values: tuple[float, ...] = field(default=())


def _eigen(rho: DensityOperator):
    w, v = np.linalg.eigh(rho.matrix)
    w = clamp_eigenvalues(w[::-1])
    v = v[:, ::-1]
    r = max(1, int(np.sum(w > RANK_TOL)))
    return w[:r], v[:, :r]


def _hermitian_from_params(params: np.ndarray, n: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.size != n * n:
        raise UsageError(f"expected {n * n} generator parameters, got {params.size}")
    h = np.zeros((n, n), dtype=complex)
    h[np.diag_indices(n)] = params[:n]
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    h[iu] = params[n : n + m] + 1j * params[n + m :]
    h = h + np.triu(h, 1).conj().T
    return h


def _ensemble_from_isometry(rho: DensityOperator, v: np.ndarray) -> Ensemble:
    lam, vecs = _eigen(rho)
    rows = v @ (vecs * np.sqrt(lam)).T
    p = np.sum(np.abs(rows) ** 2, axis=1)
    keep = p >= WEIGHT_FLOOR
    p = p[keep]
    states = tuple(Ket(row / np.sqrt(pi), rho.dims, normalize=True) for row, pi in zip(rows[keep], p))
    return Ensemble(p / p.sum(), states)


def hjw_ensemble(rho: State, isometry_params, n: int) -> Ensemble:
    """Decomposition of ``rho`` given by the first ``r`` columns of ``exp(iH)``.

    ``isometry_params`` holds ``n*n`` reals: the diagonal of ``H``, then the real
    and imaginary parts of its strict upper triangle.
    """
    rho = as_density(rho)
    lam, _ = _eigen(rho)
    r = len(lam)
    if n < r:
        raise UsageError(f"ensemble size {n} is below the rank {r}")
    u = expm(1j * _hermitian_from_params(isometry_params, n))
    return _ensemble_from_isometry(rho, u[:, :r])


# ---------------------------------------------------------------------------
# objective


class _Objective:
    """``sum_i p_i E(psi_i)`` and its gradient with respect to the isometry."""

    def __init__(self, rho: DensityOperator, kind: MeasureKind, scope: str):
        self.kind = kind
        self.dims = rho.dims
        self.nparties = len(rho.dims)
        self.coef, self.root = spectral_coefficients(kind, self.nparties)
        lam, vecs = _eigen(rho)
        self.rank = len(lam)
        self.w = vecs * np.sqrt(lam)  # D x r
        self.wbar = self.w.conj()
        if self.nparties == 2:
            # both marginals share a spectrum for pure states; use the smaller one
            self.traced = [int(np.argmin(self.dims))]
        else:
            self.traced = [0, 1, 2]

    def _marginal(self, phi: np.ndarray, x: int) -> np.ndarray:
        n = phi.shape[0]
        t = np.moveaxis(phi, x + 1, 1).reshape(n, self.dims[x], -1)
        return np.einsum("iak,ibk->iab", t, t.conj())

    def _apply(self, d: np.ndarray, phi: np.ndarray, x: int) -> np.ndarray:
        n = phi.shape[0]
        t = np.moveaxis(phi, x + 1, 1)
        shape = t.shape
        out = np.einsum("iab,ibk->iak", d, t.reshape(n, self.dims[x], -1)).reshape(shape)
        return np.moveaxis(out, 1, x + 1)

    def __call__(self, v: np.ndarray, grad: bool = True):
        n = v.shape[0]
        rows = v @ self.w.T  # n x D
        p = np.sum(np.abs(rows) ** 2, axis=1)
        live = p > WEIGHT_FLOOR**2
        phi = rows.reshape((n,) + self.dims)
        total = np.zeros(n)
        spectra = []
        for x in self.traced:
            sig = self._marginal(phi, x)
            ev, u = np.linalg.eigh(sig)
            nu = np.where(live[:, None], np.clip(ev, 0, None) / np.where(live, p, 1.0)[:, None], 0.0)
            spectra.append((nu, u))
            total += np.where(live, party_term(self.kind, nu), 0.0)
        f_inner = self.coef * total
        if self.root:
            outer = np.sqrt(np.clip(f_inner, 0, None))
        else:
            outer = f_inner
        value = float(np.sum(np.where(live, p * outer, 0.0)))
        if not grad:
            return value
        if self.root:
            douter = 0.5 / np.sqrt(np.maximum(f_inner, 1e-15))
        else:
            douter = np.ones(n)
        g = outer[:, None] * rows
        gphi = np.zeros_like(phi)
        for x, (nu, u) in zip(self.traced, spectra):
            dphi = party_term_grad(self.kind, nu)
            dmat = np.einsum("iab,ib,icb->iac", u, dphi, u.conj())
            trace_term = np.sum(dphi * nu, axis=1)
            gphi += self._apply(dmat, phi, x) - trace_term.reshape((n,) + (1,) * self.nparties) * phi
        g = g + (self.coef * douter)[:, None] * gphi.reshape(n, -1)
        g[~live] = 0.0
        return value, g @ self.wbar


def _herm(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.conj().T)


def _project(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    return x - v @ _herm(v.conj().T @ x)


def _retract(v: np.ndarray, xi: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(v + xi, full_matrices=False)
    return u @ vh


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    return 2.0 * float(np.real(np.vdot(a, b)))


def _optimise(obj: _Objective, v0: np.ndarray, sign: float, max_iters: int, rel_tol: float):
    """Riemannian CG on sign * objective. Returns (value, isometry, converged)."""

    def f(v, grad=True):
        if grad:
            val, g = obj(v)
            return sign * val, sign * g
        return sign * obj(v, grad=False)

    v = v0
    fv, g = f(v)
    z = _project(v, g)
    d = -z
    step = 1.0
    converged = False
    small = 0
    for _ in range(max_iters):
        slope = _inner(z, d)
        if slope >= 0:
            d = -z
            slope = _inner(z, d)
        if -slope < 1e-28:
            converged = True
            break
        dn = np.sqrt(_inner(d, d))
        t = min(step, 1.0 / dn) if dn > 0 else step
        accepted = False
        for _ in range(40):
            vn = _retract(v, t * d)
            fn = f(vn, grad=False)
            if fn <= fv + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True
            break
        step = 2.0 * t
        fn, gn = f(vn)
        zn = _project(vn, gn)
        # Polak-Ribiere+ with transport by projection
        zt = _project(vn, z)
        beta = max(0.0, _inner(zn, zn - zt) / max(_inner(z, z), 1e-300))
        d = -zn + beta * _project(vn, d)
        decrease = fv - fn
        v, fv, z = vn, fn, zn
        if decrease <= rel_tol * max(abs(fv), 1e-3):
            small += 1
            if small >= 3:
                converged = True
                break
        else:
            small = 0
    return sign * fv, v, converged


def _default_size(rank: int) -> int:
    return max(rank, min(rank * rank, MAX_ENSEMBLE))


def _start(rank: int, n: int, index: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    if index == 0:
        return np.eye(n, rank, dtype=complex)
    rng = np.random.default_rng(seed_seq)
    return random_unitary(n, rng)[:, :rank]


def _roof_view(rho: DensityOperator, scope: str, cut) -> DensityOperator:
    if scope == "tripartite":
        if rho.nparties != 3:
            raise UsageError(f"tripartite roof needs a 3-party state, got dims {list(rho.dims)}")
        return rho
    if scope == "bipartite":
        return as_density(bipartite_view(rho, cut))
    raise UsageError(f"unknown scope {scope!r}")


def convex_roof(
    rho: State,
    kind: MeasureKind,
    scope: str = "bipartite",
    direction: str = "min",
    config: RoofConfig | None = None,
    cut=None,
) -> RoofResult:
    """Minimal (``E_F``) or maximal (``E_a``) average of ``kind`` over decompositions of ``rho``.

    ``scope`` selects the two-party formula across ``cut`` or the three-party one.
    Restarts are seeded from ``config.seed``; restart 0 starts at the eigen-ensemble.
    """
    config = config or RoofConfig()
    if direction not in ("min", "max"):
        raise UsageError(f"direction must be 'min' or 'max', got {direction!r}")
    if kind.kind not in (
        Kind.EOF, Kind.CONCURRENCE, Kind.TANGLE, Kind.TSALLIS, Kind.RENYI,
        Kind.NEGATIVITY_ROOF, Kind.GEOMETRIC,
    ):
        raise KindError(f"no convex roof is built for {kind.label}")
    if kind.kind is Kind.GEOMETRIC and scope == "tripartite":
        raise KindError("mixed-state tripartite geometric measure is not supported")
    if scope == "tripartite":
        kind.check_tripartite()
    rho = _roof_view(as_density(rho), scope, cut)
    lam, vecs = _eigen(rho)
    r = len(lam)

    if r == 1:
        psi = Ket(vecs[:, 0], rho.dims, normalize=True)
        val = measure_pure(psi, kind, scope)
        return RoofResult(val, Ensemble(np.array([1.0]), (psi,)), direction, True, 0.0, (val,))

    n = config.ensemble_size or _default_size(r)
    if n < r:
        raise UsageError(f"ensemble size {n} is below the rank {r}")
    obj = _Objective(rho, kind, scope)
    sign = 1.0 if direction == "min" else -1.0
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    def run(i):
        v0 = _start(r, n, i, seeds[i])
        return _optimise(obj, v0, sign, config.max_iters, config.rel_tol)

    workers = config.workers or default_workers()
    if workers > 1 and config.restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, range(config.restarts)))
    else:
        results = [run(i) for i in range(config.restarts)]

    vals = np.array([res[0] for res in results])
    best = int(np.argmin(sign * vals))  # first index wins ties
    value, v, conv = results[best]
    ens = _ensemble_from_isometry(rho, v)
    return RoofResult(float(value), ens, direction, bool(conv), float(vals.max() - vals.min()), tuple(vals))


# ---------------------------------------------------------------------------
# two-qubit closed form

_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


def wootters_concurrence(rho: State) -> float:
    """max(0, l1 - l2 - l3 - l4) over square roots of the spin-flipped spectrum.

    With ``rho = V V^dagger`` the ``l_i`` are the singular values of the symmetric
    matrix ``V^T (Y x Y) V``, which avoids square roots of near-zero eigenvalues.
    """
    rho = as_density(rho)
    if tuple(rho.dims) != (2, 2):
        raise UsageError(f"Wootters formula needs dims [2, 2], got {list(rho.dims)}")
    w, u = np.linalg.eigh(rho.matrix)
    v = u * np.sqrt(np.clip(w, 0, None))
    sv = np.linalg.svd(v.T @ _YY @ v, compute_uv=False)
    return float(max(0.0, sv[0] - sv[1] - sv[2] - sv[3]))


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return float(-x * np.log(x) - (1 - x) * np.log(1 - x))


def wootters_ef(rho: State) -> tuple[float, float]:
    """Two-qubit concurrence and entanglement of formation (nats)."""
    c = min(1.0, wootters_concurrence(rho))
    return c, binary_entropy(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c))))

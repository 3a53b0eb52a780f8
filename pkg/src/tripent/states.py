"""State families: GHZ/W, MEMS constructions, Haar sampling, spectrum-targeted qubit pairs."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import prod
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from .qcore import (
    DensityOperator,
    Ket,
    UsageError,
    partial_trace,
    purity,
)

SPECTRUM_TOL = 1e-9


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def basis_ket(index: Sequence[int], dims: Sequence[int]) -> Ket:
    v = np.zeros(prod(dims), dtype=complex)
    v[np.ravel_multi_index(tuple(index), tuple(dims))] = 1.0
    return Ket(v, dims)


def bell(which: str = "phi+") -> Ket:
    """Two-qubit Bell state; ``phi+`` is (|00> + |11>)/sqrt2."""
    s = 1 / np.sqrt(2)
    vecs = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    if which not in vecs:
        raise UsageError(f"unknown Bell state {which!r}; choose from {', '.join(vecs)}")
    return Ket(vecs[which], (2, 2), normalize=True)


def ghz(d: int = 2, parties: int = 3) -> Ket:
    if d < 2 or parties < 2:
        raise UsageError("ghz needs d >= 2 and at least 2 parties")
    v = np.zeros(d**parties, dtype=complex)
    for k in range(d):
        v[np.ravel_multi_index((k,) * parties, (d,) * parties)] = 1.0
    return Ket(v, (d,) * parties, normalize=True)


def w_state() -> Ket:
    v = np.zeros(8, dtype=complex)
    v[[1, 2, 4]] = 1.0
    return Ket(v, (2, 2, 2), normalize=True)


def generalized_ghz(lams: Sequence[float]) -> Ket:
    """sum_k lam_k |kkk> with ``sum lam_k^2 = 1``."""
    lams = np.asarray(lams, dtype=float)
    if abs(np.sum(lams**2) - 1.0) > 1e-4:
        raise UsageError(f"squared coefficients sum to {np.sum(lams ** 2)!r}, expected 1")
    d = len(lams)
    v = np.zeros(d**3, dtype=complex)
    for k, lam in enumerate(lams):
        v[np.ravel_multi_index((k, k, k), (d, d, d))] = lam
    return Ket(v, (d, d, d), normalize=True)


def random_pure(dims: Sequence[int], seed=None) -> Ket:
    """Haar-random ket from a normalised complex Gaussian vector."""
    rng = _rng(seed)
    n = prod(dims)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return Ket(z, dims, normalize=True)


def random_mixed(dims: Sequence[int], rank: int | None = None, seed=None) -> DensityOperator:
    """Induced-measure mixed state: partial trace of a Haar ket with ancilla dim ``rank``."""
    total = prod(dims)
    rank = total if rank is None else int(rank)
    if not 1 <= rank <= total:
        raise UsageError(f"rank must lie in [1, {total}], got {rank}")
    psi = random_pure(tuple(dims) + (rank,), seed)
    return partial_trace(psi, list(range(len(dims))))


# ---------------------------------------------------------------------------
# maximally entangled mixed states


@dataclass(frozen=True)
class MemsSpec:
    """Parameters of ``|psi+>^{A B1} (x) sum_k p_k |k><k|^{B2}``.

    B has dimension ``m * r``; the B1 index runs fastest, so branch ``k`` occupies
    B levels ``k*m .. k*m + m - 1``. Zero-probability branches are dropped.
    """

    m: int
    r: int
    probs: tuple[float, ...]
    l: int | None = None

    def __init__(self, m: int, r: int, probs: Sequence[float] | None = None, l: int | None = None):
        if m < 2:
            raise UsageError(f"m must be at least 2, got {m}")
        if r < 1:
            raise UsageError(f"r must be at least 1, got {r}")
        probs = tuple(float(p) for p in (probs if probs is not None else [1.0 / r] * r))
        if len(probs) != r:
            raise UsageError(f"expected {r} probabilities, got {len(probs)}")
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise UsageError("probabilities must be nonnegative and sum to 1")
        if l is not None and l < 1:
            raise UsageError(f"l must be at least 1, got {l}")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "r", int(r))
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "l", l)

    def pruned(self) -> "MemsSpec":
        kept = [p for p in self.probs if p > 0]
        return MemsSpec(self.m, len(kept), kept, self.l)


def mems_extension_pure(spec: MemsSpec) -> Ket:
    """Purification ``|psi+>^{A B1} sum_k sqrt(p_k) |k>^{B2} |k>^C`` on dims [m, m*r, r]."""
    spec = spec.pruned()
    m, r = spec.m, spec.r
    t = np.zeros((m, m * r, r), dtype=complex)
    for k, p in enumerate(spec.probs):
        for i in range(m):
            t[i, k * m + i, k] = np.sqrt(p / m)
    return Ket(t.reshape(-1), (m, m * r, r), normalize=True)


def mems(spec: MemsSpec) -> DensityOperator:
    """Mixed state on dims [m, m*r] with ``rho_A = I/m``; pure MES when one branch survives."""
    spec = spec.pruned()
    if spec.r == 1:
        v = np.eye(spec.m, dtype=complex).reshape(-1) / np.sqrt(spec.m)
        return Ket(v, (spec.m, spec.m)).density()
    return partial_trace(mems_extension_pure(spec), [0, 1])


DOUBLE_MEMS_MAX_DIM = 64


def double_mems(m: int, r: int, l: int) -> DensityOperator:
    """Uniform mixture over ``s`` of ``(1/sqrt(mr)) sum_{i,k} |i,k>^B |i>^A |k,s>^C``.

    Parties are ordered (B, A, C) with dims [m*r, m, r*l]; B index ``k*m + i``,
    C index ``k*l + s``. ``l = 1`` gives a pure state.
    """
    if m < 2 or r < 1 or l < 1:
        raise UsageError("double_mems needs m >= 2, r >= 1, l >= 1")
    dims = (m * r, m, r * l)
    if prod(dims) > DOUBLE_MEMS_MAX_DIM:
        raise UsageError(f"double_mems dimension {prod(dims)} exceeds {DOUBLE_MEMS_MAX_DIM}")
    rho = np.zeros((prod(dims),) * 2, dtype=complex)
    for s in range(l):
        t = np.zeros(dims, dtype=complex)
        for i in range(m):
            for k in range(r):
                t[k * m + i, i, k * l + s] = 1.0
        v = t.reshape(-1) / np.sqrt(m * r)
        rho += np.outer(v, v.conj()) / l
    return DensityOperator(rho, dims)


class MemsClass(str, Enum):
    PURE_MES = "PureMES"
    UP_TO_A = "MemsUpToA"
    UP_TO_B = "MemsUpToB"
    NOT_MEMS = "NotMems"


@dataclass(frozen=True)
class MemsVerdict:
    """Classification of a bipartite state with the numbers that decided it.

    ``genuine`` is only ever ``True`` for pure inputs: mixed states are never
    maximally entangled in the strong sense, whatever their marginals.
    """

    label: MemsClass
    evidence: dict

    @property
    def genuine(self) -> bool:
        return self.label is MemsClass.PURE_MES


def classify_mems(rho, cut=None, tol: float = 1e-8) -> MemsVerdict:
    """Decide whether ``rho`` is a pure MES, a MEMS up to part A or B, or neither."""
    from .measures import parse_cut
    from .monogamy import Factorization, factorize_pure
    from .qcore import as_density, merge, purify, rank, spectrum

    rho = as_density(rho)
    groups = parse_cut(cut, rho.nparties)
    view = as_density(merge(rho, groups))
    swapped = view.dims[0] > view.dims[1]
    if swapped:
        view = as_density(merge(view, [[1], [0]]))
    m, n = view.dims
    rho_a = partial_trace(view, 0)
    dev = float(np.linalg.norm(rho_a.matrix - np.eye(m) / m))
    rk = rank(view)
    ev = {"swapped": swapped, "dims": (m, n), "rank": rk, "marginal_deviation": dev, "genuine": "pure-only"}
    if dev > tol:
        return MemsVerdict(MemsClass.NOT_MEMS, ev)
    if rk == 1:
        return MemsVerdict(MemsClass.PURE_MES, ev)
    if n < 2 * m:
        ev["reason"] = "dim B < 2 dim A"
        return MemsVerdict(MemsClass.NOT_MEMS, ev)
    fac = factorize_pure(purify(view), pivot=1)
    if not isinstance(fac, Factorization):
        ev["product_deviation"] = fac.deviation
        return MemsVerdict(MemsClass.NOT_MEMS, ev)
    ev["factor_residual"] = fac.residual
    ev["split"] = fac.split_dims
    if not fac.success or fac.split_dims[0] != m:
        return MemsVerdict(MemsClass.NOT_MEMS, ev)
    probs = spectrum(view)[:rk]
    ev["probs"] = tuple(float(p) for p in probs)
    if np.ptp(probs) <= tol:
        return MemsVerdict(MemsClass.UP_TO_B, ev)
    return MemsVerdict(MemsClass.UP_TO_A, ev)


# ---------------------------------------------------------------------------
# two-qubit states with prescribed spectra


@dataclass(frozen=True)
class SpectrumTarget:
    joint: tuple[float, ...]
    marginal_a_min: float
    marginal_b_min: float

    def __init__(self, joint: Sequence[float], marginal_a_min: float, marginal_b_min: float):
        object.__setattr__(self, "joint", tuple(sorted((float(x) for x in joint), reverse=True)))
        object.__setattr__(self, "marginal_a_min", float(marginal_a_min))
        object.__setattr__(self, "marginal_b_min", float(marginal_b_min))


@dataclass(frozen=True)
class Infeasible:
    failing: tuple[str, ...]
    slacks: tuple[float, ...]

    found = False


@dataclass(frozen=True)
class NotFound:
    best_residual: float

    found = False


def _unitary(params: np.ndarray) -> np.ndarray:
    h = params[:16].reshape(4, 4) + 1j * params[16:].reshape(4, 4)
    return expm(h - h.conj().T)


def _minimal_eigenvalue(rho: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(rho)[0])


def state_with_spectra(target: SpectrumTarget, seed=0, max_iters: int = 200, restarts: int = 16):
    """Two-qubit state ``U diag(joint) U^dagger`` whose marginals have the target minimal eigenvalues.

    Returns a :class:`DensityOperator`, :class:`Infeasible` when the spectral
    compatibility inequalities fail, or :class:`NotFound`.
    """
    from .monogamy import marginal_compatibility

    check = marginal_compatibility(target.joint, target.marginal_a_min, target.marginal_b_min)
    if not check:
        return Infeasible(tuple(check.failing), check.slacks)
    lam = np.diag(np.asarray(target.joint, dtype=complex))
    goal = np.array([la**2 + (1 - la) ** 2 for la in (target.marginal_a_min, target.marginal_b_min)])

    def state(p):
        u = _unitary(p)
        return DensityOperator(u @ lam @ u.conj().T, (2, 2), check=False)

    def residual(p):
        rho = state(p)
        return np.array([purity(partial_trace(rho, 0)), purity(partial_trace(rho, 1))]) - goal

    best = np.inf
    for child in np.random.SeedSequence(seed).spawn(restarts):
        x0 = np.random.default_rng(child).standard_normal(32)
        sol = least_squares(residual, x0, max_nfev=max_iters, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        rho = state(sol.x)
        err = max(
            abs(_minimal_eigenvalue(partial_trace(rho, 0).matrix) - target.marginal_a_min),
            abs(_minimal_eigenvalue(partial_trace(rho, 1).matrix) - target.marginal_b_min),
        )
        if err <= 1e-8:
            m = rho.matrix
            return DensityOperator(0.5 * (m + m.conj().T), (2, 2))
        best = min(best, err)
    return NotFound(float(best))

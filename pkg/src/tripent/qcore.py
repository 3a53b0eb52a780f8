"""Dense state representation and the linear algebra everything else is built on.

Party index 0 is the leftmost tensor factor. Marginals keep the relative order
of the parties they retain. All entropies are in nats.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence, Union

import numpy as np

NORM_TOL = 1e-10
HERM_TOL = 1e-10
PSD_TOL = 1e-9
RANK_TOL = 1e-10


class TripentError(ValueError):
    """Base class for errors raised by this package."""


class UsageError(TripentError):
    """Malformed call: wrong party count, empty subsystem set, bad dims."""


class ParameterError(TripentError):
    """A measure or entropy parameter outside its admissible range."""


class InvariantError(TripentError):
    """Input data violating a state invariant (norm, hermiticity, positivity)."""


def _check_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise UsageError(f"dims must be a nonempty list of positive integers, got {dims}")
    if prod(dims) != size:
        raise UsageError(f"product of dims {dims} is {prod(dims)}, expected {size}")
    return dims


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ket:
    """Unit-norm pure state with ordered subsystem dimensions."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, amplitudes, dims: Sequence[int] | None = None, *, normalize: bool = False):
        vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if dims is None:
            dims = (vec.size,)
        dims = _check_dims(dims, vec.size)
        norm = np.linalg.norm(vec)
        if normalize:
            if norm == 0:
                raise InvariantError("cannot normalize the zero vector")
            vec = vec / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise InvariantError(f"ket norm is {norm!r}, expected 1 within {NORM_TOL}")
        object.__setattr__(self, "amplitudes", _frozen(vec))
        object.__setattr__(self, "dims", dims)

    @property
    def nparties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims, check=False)

    def __repr__(self) -> str:
        return f"Ket(dims={list(self.dims)})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix with subsystem dims."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, matrix, dims: Sequence[int] | None = None, *, check: bool = True):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise UsageError(f"density operator must be a square matrix, got shape {m.shape}")
        if dims is None:
            dims = (m.shape[0],)
        dims = _check_dims(dims, m.shape[0])
        if check:
            dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
            if dev > HERM_TOL:
                raise InvariantError(f"matrix is not Hermitian (max deviation {dev:.3g})")
            tr = np.trace(m).real
            if abs(tr - 1.0) > NORM_TOL:
                raise InvariantError(f"trace is {tr!r}, expected 1 within {NORM_TOL}")
            lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
            if lo < -PSD_TOL:
                raise InvariantError(f"minimum eigenvalue {lo:.3g} is below -{PSD_TOL}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def nparties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityOperator(dims={list(self.dims)})"


State = Union[Ket, DensityOperator]


def as_density(state: State) -> DensityOperator:
    return state.density() if isinstance(state, Ket) else state


def parties(keep: Sequence[int] | int, n: int) -> tuple[int, ...]:
    """Validate a subsystem set against ``n`` parties; returns sorted indices."""
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    idx = tuple(sorted(set(int(k) for k in keep)))
    if len(idx) != len(tuple(keep)):
        raise UsageError(f"subsystem indices must be distinct, got {tuple(keep)}")
    if any(k < 0 or k >= n for k in idx):
        raise UsageError(f"subsystem indices {idx} out of range for {n} parties")
    return idx


def tensor(a: State, b: State) -> State:
    """Kronecker product with concatenated dims. Both operands must be the same kind."""
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims, normalize=False)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    raise UsageError("tensor() operands must both be kets or both be density operators")


def _ptrace_matrix(m: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    n = len(dims)
    t = m.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # contract each traced row index with its column index
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = [letters[k] for k in range(n)]
    cols = [letters[k].upper() for k in range(n)]
    for k in traced:
        cols[k] = rows[k]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    r = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    dk = prod(dims[k] for k in keep)
    return r.reshape(dk, dk)


def partial_trace(rho: State, keep: Sequence[int] | int) -> DensityOperator:
    """Reduced state on the parties in ``keep``, which stay in their original relative order."""
    if isinstance(keep, (list, tuple)) and len(keep) == 0:
        raise UsageError("keep set must be nonempty")
    keep = parties(keep, len(rho.dims))
    dims = rho.dims
    if isinstance(rho, Ket):
        t = rho.amplitudes.reshape(dims)
        t = np.moveaxis(t, keep, range(len(keep)))
        dk = prod(dims[k] for k in keep)
        mat = t.reshape(dk, -1)
        red = mat @ mat.conj().T
    else:
        red = _ptrace_matrix(rho.matrix, dims, keep)
    red = 0.5 * (red + red.conj().T)
    return DensityOperator(red, [dims[k] for k in keep], check=False)


def permute(state: State, order: Sequence[int]) -> State:
    """Reorder parties: new party ``j`` is old party ``order[j]``."""
    order = tuple(order)
    if sorted(order) != list(range(len(state.dims))):
        raise UsageError(f"{order} is not a permutation of {len(state.dims)} parties")
    dims = tuple(state.dims[k] for k in order)
    if isinstance(state, Ket):
        t = np.transpose(state.tensor_view(), order)
        return Ket(t.reshape(-1), dims)
    n = len(order)
    t = state.matrix.reshape(state.dims + state.dims)
    t = np.transpose(t, order + tuple(n + k for k in order))
    return DensityOperator(t.reshape(state.dim, state.dim), dims, check=False)


def merge(state: State, groups: Sequence[Sequence[int]]) -> State:
    """Regroup parties into composite parties, e.g. ``[[0], [1, 2]]`` for the A|BC cut.

    Every party must appear in exactly one group; groups are laid out in the given order.
    """
    flat = [k for g in groups for k in g]
    if sorted(flat) != list(range(len(state.dims))):
        raise UsageError(f"groups {groups} must partition {len(state.dims)} parties")
    p = permute(state, flat)
    dims = [prod(state.dims[k] for k in g) for g in groups]
    if isinstance(p, Ket):
        return Ket(p.amplitudes, dims)
    return DensityOperator(p.matrix, dims, check=False)


def partial_transpose(rho: State, subsystem: Sequence[int] | int) -> np.ndarray:
    """Transpose with respect to the given parties. Result is Hermitian, not necessarily PSD."""
    rho = as_density(rho)
    sub = parties(subsystem, len(rho.dims))
    dims = rho.dims
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    axes = list(range(2 * n))
    for k in sub:
        axes[k], axes[n + k] = axes[n + k], axes[k]
    return np.transpose(t, axes).reshape(rho.dim, rho.dim)


def trace_norm(h: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (h + h.conj().T)))))


def spectrum(rho: State) -> np.ndarray:
    """Descending eigenvalues, with noise in [-PSD_TOL, 0) clamped to zero."""
    rho = as_density(rho)
    ev = np.linalg.eigvalsh(rho.matrix)[::-1]
    return clamp_eigenvalues(ev)


def clamp_eigenvalues(ev: np.ndarray) -> np.ndarray:
    ev = np.asarray(ev, dtype=float)
    if ev.size and ev.min() < -PSD_TOL:
        raise InvariantError(f"eigenvalue {ev.min():.3g} is below -{PSD_TOL}")
    return np.where(ev < 0, 0.0, ev)


def rank(rho: State, tol: float = RANK_TOL) -> int:
    return int(np.sum(spectrum(rho) > tol))


def purity(rho: State) -> float:
    rho = as_density(rho)
    return float(np.real(np.vdot(rho.matrix, rho.matrix)))


def entropy_of_spectrum(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho: State) -> float:
    """S(rho) = -Tr rho ln rho, with 0 ln 0 = 0."""
    return entropy_of_spectrum(spectrum(rho))


def tsallis_of_spectrum(p: np.ndarray, q: float) -> float:
    p = p[p > 0]
    return float((np.sum(p**q) - 1.0) / (1.0 - q))


def tsallis_entropy(rho: State, q: float) -> float:
    """T_q(rho) = (Tr rho^q - 1) / (1 - q) for q > 0, q != 1."""
    if not q > 0 or q == 1:
        raise ParameterError(f"Tsallis index must satisfy q > 0 and q != 1, got {q}")
    return tsallis_of_spectrum(spectrum(rho), q)


def renyi_of_spectrum(p: np.ndarray, alpha: float) -> float:
    p = p[p > 0]
    return float(np.log(np.sum(p**alpha)) / (1.0 - alpha))


def renyi_entropy(rho: State, alpha: float) -> float:
    """R_alpha(rho) = ln(Tr rho^alpha) / (1 - alpha) for 0 < alpha < 1."""
    if not 0 < alpha < 1:
        raise ParameterError(f"Renyi index must lie in (0, 1), got {alpha}")
    return renyi_of_spectrum(spectrum(rho), alpha)


def sqrt_trace(rho: State) -> float:
    """Tr sqrt(rho) = sum of square roots of the eigenvalues."""
    return float(np.sum(np.sqrt(spectrum(rho))))


def purify(rho: State) -> Ket:
    """Purification on ``dims + [rank]``; the ancilla is the last party."""
    rho = as_density(rho)
    w, v = np.linalg.eigh(rho.matrix)
    w = clamp_eigenvalues(w[::-1])
    v = v[:, ::-1]
    r = max(1, int(np.sum(w > RANK_TOL)))
    w, v = w[:r], v[:, :r]
    psi = (v * np.sqrt(w)).reshape(-1)  # amplitude (x, k) = sqrt(w_k) v_xk
    return Ket(psi, rho.dims + (r,), normalize=True)


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of a - b."""
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def local_unitary(state: State, unitaries: Sequence[np.ndarray]) -> State:
    u = unitaries[0]
    for x in unitaries[1:]:
        u = np.kron(u, x)
    if isinstance(state, Ket):
        return Ket(u @ state.amplitudes, state.dims, normalize=True)
    return DensityOperator(u @ state.matrix @ u.conj().T, state.dims, check=False)

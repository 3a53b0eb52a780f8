"""Pure-state entanglement measures for two and three parties.

Every unified measure is a function of the single-party marginal spectra of a
pure state. For a kind with per-party term ``phi`` the bipartite value is
``outer(c2 * phi(rho_A))`` and the tripartite value is
``outer(c3 * sum_X phi(rho_X))``; the table in :data:`_SPECTRAL` holds
``(c2, c3, outer)``. The same terms drive the gradient of the convex-roof
optimizer in :mod:`tripent.convexroof`.

The negativity family uses the normalisation that makes the bipartite and
tripartite formulas agree on bi-separable states::

    N2(rho_AB)  = ||rho^{T_A}|| + ||rho^{T_B}|| - 2
    N3(rho_ABC) = ||rho^{T_A}|| + ||rho^{T_B}|| + ||rho^{T_C}|| - 3

which is four times the textbook negativity on pure two-party states. The
textbook value is available from :func:`negativity_mixed`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .qcore import (
    DensityOperator,
    Ket,
    ParameterError,
    State,
    UsageError,
    as_density,
    clamp_eigenvalues,
    merge,
    partial_trace,
    partial_transpose,
    permute,
    purity,
    trace_norm,
)

GRAD_FLOOR = 1e-15
CONDITION_TOL = 1e-9


class KindError(UsageError):
    """Measure kind not defined for the requested scope or input."""


class Kind(str, Enum):
    EOF = "eof"
    CONCURRENCE = "concurrence"
    TANGLE = "tangle"
    TSALLIS = "tsallis"
    RENYI = "renyi"
    NEGATIVITY = "negativity"
    NEGATIVITY_ROOF = "negativity-roof"
    TAU_PRIME = "tau-prime"
    THREE_TANGLE = "three-tangle"
    GEOMETRIC = "geometric"


@dataclass(frozen=True)
class MeasureKind:
    """A measure together with its parameter (``q`` for Tsallis, ``alpha`` for Renyi)."""

    kind: Kind
    param: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.TSALLIS:
            if self.param is None or not self.param > 0 or self.param == 1:
                raise ParameterError(f"Tsallis q must be > 0 and != 1, got {self.param}")
        elif self.kind is Kind.RENYI:
            if self.param is None or not 0 < self.param < 1:
                raise ParameterError(f"Renyi alpha must lie in (0, 1), got {self.param}")
        elif self.param is not None:
            raise ParameterError(f"{self.kind.value} takes no parameter")

    @classmethod
    def parse(cls, name: str, q: float | None = None, alpha: float | None = None) -> "MeasureKind":
        try:
            kind = Kind(name.lower().replace("_", "-"))
        except ValueError:
            choices = ", ".join(k.value for k in Kind)
            raise KindError(f"unknown measure kind {name!r}; choose from {choices}") from None
        if kind is Kind.TSALLIS:
            return cls(kind, 2.0 if q is None else float(q))
        if kind is Kind.RENYI:
            return cls(kind, 0.5 if alpha is None else float(alpha))
        return cls(kind)

    @property
    def label(self) -> str:
        if self.param is None:
            return self.kind.value
        return f"{self.kind.value}({self.param:g})"

    @property
    def is_roof(self) -> bool:
        """Mixed-state values come from the convex roof of the pure formula."""
        return self.kind in _SPECTRAL and self.kind is not Kind.NEGATIVITY

    @property
    def bipartite_counterpart(self) -> "MeasureKind":
        """The two-party measure paired with this kind in the hierarchy and audits."""
        if self.kind in (Kind.TAU_PRIME, Kind.THREE_TANGLE):
            return TANGLE
        return self

    def check_tripartite(self) -> None:
        if self.kind is Kind.TSALLIS and self.param <= 1:
            raise ParameterError(f"tripartite Tsallis entanglement needs q > 1, got {self.param}")


EOF = MeasureKind(Kind.EOF)
CONCURRENCE = MeasureKind(Kind.CONCURRENCE)
TANGLE = MeasureKind(Kind.TANGLE)
NEGATIVITY = MeasureKind(Kind.NEGATIVITY)
NEGATIVITY_ROOF = MeasureKind(Kind.NEGATIVITY_ROOF)
TAU_PRIME = MeasureKind(Kind.TAU_PRIME)
THREE_TANGLE = MeasureKind(Kind.THREE_TANGLE)
GEOMETRIC = MeasureKind(Kind.GEOMETRIC)


def tsallis(q: float) -> MeasureKind:
    return MeasureKind(Kind.TSALLIS, float(q))


def renyi(alpha: float) -> MeasureKind:
    return MeasureKind(Kind.RENYI, float(alpha))


# ---------------------------------------------------------------------------
# spectral party terms, vectorised over a leading batch axis


def _xlogx(nu):
    out = np.zeros_like(nu)
    pos = nu > 0
    out[pos] = nu[pos] * np.log(nu[pos])
    return out


def party_term(kind: MeasureKind, nu: np.ndarray) -> np.ndarray:
    """``phi(nu)`` over the last axis of a batch of (normalised) spectra."""
    k = kind.kind
    nu = np.asarray(nu, dtype=float)
    if k is Kind.EOF:
        return -np.sum(_xlogx(nu), axis=-1)
    if k in (Kind.TANGLE, Kind.CONCURRENCE):
        return 1.0 - np.sum(nu**2, axis=-1)
    if k is Kind.TSALLIS:
        q = kind.param
        return (np.sum(np.where(nu > 0, np.abs(nu) ** q, 0.0), axis=-1) - 1.0) / (1.0 - q)
    if k is Kind.RENYI:
        a = kind.param
        return np.log(np.sum(np.where(nu > 0, np.abs(nu) ** a, 0.0), axis=-1)) / (1.0 - a)
    if k in (Kind.NEGATIVITY, Kind.NEGATIVITY_ROOF):
        return np.sum(np.sqrt(np.clip(nu, 0, None)), axis=-1) ** 2 - 1.0
    if k is Kind.GEOMETRIC:
        return 1.0 - np.max(nu, axis=-1)
    raise KindError(f"{kind.label} has no spectral form")


def party_term_grad(kind: MeasureKind, nu: np.ndarray) -> np.ndarray:
    """Elementwise derivative of :func:`party_term` with respect to each eigenvalue."""
    k = kind.kind
    nu = np.asarray(nu, dtype=float)
    fl = np.maximum(nu, GRAD_FLOOR)
    if k is Kind.EOF:
        return -np.log(fl) - 1.0
    if k in (Kind.TANGLE, Kind.CONCURRENCE):
        return -2.0 * nu
    if k is Kind.TSALLIS:
        q = kind.param
        return q * fl ** (q - 1.0) / (1.0 - q)
    if k is Kind.RENYI:
        a = kind.param
        s = np.sum(np.where(nu > 0, np.abs(nu) ** a, 0.0), axis=-1, keepdims=True)
        return a * fl ** (a - 1.0) / ((1.0 - a) * s)
    if k in (Kind.NEGATIVITY, Kind.NEGATIVITY_ROOF):
        s = np.sum(np.sqrt(np.clip(nu, 0, None)), axis=-1, keepdims=True)
        return s / np.sqrt(fl)
    if k is Kind.GEOMETRIC:
        g = np.zeros_like(nu)
        np.put_along_axis(g, np.argmax(nu, axis=-1)[..., None], -1.0, axis=-1)
        return g
    raise KindError(f"{kind.label} has no spectral form")


# kind -> (bipartite coefficient, tripartite coefficient, takes square root)
_SPECTRAL = {
    Kind.EOF: (1.0, 0.5, False),
    Kind.TANGLE: (2.0, 1.0, False),
    Kind.CONCURRENCE: (2.0, 1.0, True),
    Kind.TSALLIS: (1.0, 0.5, False),
    Kind.RENYI: (1.0, 0.5, False),
    Kind.NEGATIVITY: (2.0, 1.0, False),
    Kind.NEGATIVITY_ROOF: (2.0, 1.0, False),
    Kind.GEOMETRIC: (1.0, None, False),
}


def spectral_coefficients(kind: MeasureKind, nparties: int) -> tuple[float, bool]:
    """Coefficient and square-root flag combining the party terms."""
    if kind.kind not in _SPECTRAL:
        raise KindError(f"{kind.label} is not a spectral measure")
    c2, c3, root = _SPECTRAL[kind.kind]
    c = c2 if nparties == 2 else c3
    if c is None:
        raise KindError(f"{kind.label} has no spectral tripartite form")
    return c, root


def _marginal_spectrum(psi: Ket, party: Sequence[int] | int) -> np.ndarray:
    rho = partial_trace(psi, party)
    return clamp_eigenvalues(np.linalg.eigvalsh(rho.matrix)[::-1])


# ---------------------------------------------------------------------------
# cuts

_LETTERS = "ABCDEFGH"


def parse_cut(cut, nparties: int) -> list[list[int]]:
    """Turn ``"A|BC"``, ``[[0], [1, 2]]`` or ``0`` into a two-group partition."""
    if cut is None:
        if nparties != 2:
            raise UsageError(f"a cut is required for a {nparties}-party state")
        return [[0], [1]]
    if isinstance(cut, (int, np.integer)):
        first = [int(cut)]
        return [first, [k for k in range(nparties) if k != cut]]
    if isinstance(cut, str):
        try:
            groups = [[_LETTERS.index(ch) for ch in part.strip().upper()] for part in cut.split("|")]
        except ValueError:
            raise UsageError(f"cannot parse cut {cut!r}") from None
    else:
        groups = [list(g) for g in cut]
    if len(groups) == 1:
        groups.append([k for k in range(nparties) if k not in groups[0]])
    flat = sorted(k for g in groups for k in g)
    if len(groups) != 2 or flat != list(range(nparties)) or not all(groups):
        raise UsageError(f"cut {cut!r} is not a bipartition of {nparties} parties")
    return groups


def cut_label(groups: Sequence[Sequence[int]]) -> str:
    return "|".join("".join(_LETTERS[k] for k in g) for g in groups)


def bipartite_view(state: State, cut=None) -> State:
    """Two-party view of a state across a cut (parties merged, order per the cut)."""
    groups = parse_cut(cut, len(state.dims))
    if len(state.dims) == 2 and groups == [[0], [1]]:
        return state
    return merge(state, groups)


# ---------------------------------------------------------------------------
# pure states


def measure_pure_bipartite(psi: Ket, kind: MeasureKind, cut=None) -> float:
    """Pure two-party value, optionally across a cut of a multi-party ket.

    >>> from tripent.states import bell
    >>> round(measure_pure_bipartite(bell(), EOF), 6)
    0.693147
    """
    if kind.kind in (Kind.TAU_PRIME, Kind.THREE_TANGLE):
        raise KindError(f"{kind.label} is only defined on three-party states")
    psi = bipartite_view(psi, cut)
    if kind.kind in (Kind.NEGATIVITY, Kind.NEGATIVITY_ROOF):
        return unified_negativity(psi)
    nu = _marginal_spectrum(psi, 0)
    c, root = spectral_coefficients(kind, 2)
    v = c * float(party_term(kind, nu))
    return float(np.sqrt(max(v, 0.0))) if root else v


def measure_pure_tripartite(psi: Ket, kind: MeasureKind) -> float:
    """Pure three-party value of any implemented kind."""
    if psi.nparties != 3:
        raise UsageError(f"tripartite measures need a 3-party ket, got dims {list(psi.dims)}")
    kind.check_tripartite()
    if kind.kind is Kind.THREE_TANGLE:
        return three_tangle(psi)
    if kind.kind is Kind.GEOMETRIC:
        return geometric_measure_pure(psi)
    if kind.kind is Kind.TAU_PRIME:
        p = [purity(partial_trace(psi, x)) for x in range(3)]
        return float(2.0 * (1.0 - np.sqrt(p[0] * p[1] * p[2])))
    c, root = spectral_coefficients(kind, 3)
    total = sum(float(party_term(kind, _marginal_spectrum(psi, x))) for x in range(3))
    v = c * total
    return float(np.sqrt(max(v, 0.0))) if root else v


def measure_pure(psi: Ket, kind: MeasureKind, scope: str = "auto", cut=None) -> float:
    if scope == "auto":
        scope = "tripartite" if psi.nparties == 3 and cut is None else "bipartite"
    if scope == "tripartite":
        return measure_pure_tripartite(psi, kind)
    if scope == "bipartite":
        return measure_pure_bipartite(psi, kind, cut)
    raise UsageError(f"unknown scope {scope!r}")


# ---------------------------------------------------------------------------
# negativities on arbitrary states


def negativity_mixed(rho: State, scope: str = "bipartite", cut=None) -> float:
    """Closed-form negativity of a possibly mixed state.

    ``bipartite`` gives the textbook ``(||rho^{T_A}||_1 - 1) / 2`` across the cut;
    ``tripartite`` gives the sum of the three single-party partial-transpose norms minus 3.
    """
    rho = as_density(rho)
    if scope == "bipartite":
        view = bipartite_view(rho, cut)
        return 0.5 * (trace_norm(partial_transpose(view, 0)) - 1.0)
    if scope == "tripartite":
        if rho.nparties != 3:
            raise UsageError("tripartite negativity needs a 3-party state")
        return sum(trace_norm(partial_transpose(rho, x)) for x in range(3)) - 3.0
    raise UsageError(f"unknown scope {scope!r}")


def unified_negativity(rho: State, cut=None) -> float:
    """Two-party negativity in the normalisation shared with the tripartite form."""
    view = as_density(bipartite_view(rho, cut))
    return trace_norm(partial_transpose(view, 0)) + trace_norm(partial_transpose(view, 1)) - 2.0


# ---------------------------------------------------------------------------
# derived quantities


_CUTS = ([[0], [1, 2]], [[1], [0, 2]], [[2], [0, 1]])


def cut_values(psi: Ket, kind: MeasureKind) -> dict[str, float]:
    """Bipartite values across A|BC, B|AC and C|AB."""
    bk = kind.bipartite_counterpart
    return {cut_label(g): measure_pure_bipartite(psi, bk, g) for g in _CUTS}


def e32_pure(psi: Ket, kind: MeasureKind) -> float:
    """Minimum of the three single-party cut values."""
    if psi.nparties != 3:
        raise UsageError("E^(3-2) needs a 3-party ket")
    return min(cut_values(psi, kind).values())


def three_tangle(psi: Ket) -> float:
    """C^2_{A|BC} - C^2_{AB} - C^2_{AC} for a three-qubit pure state."""
    from .convexroof import wootters_concurrence

    if psi.dims != (2, 2, 2):
        raise UsageError(f"three-tangle needs dims [2, 2, 2], got {list(psi.dims)}")
    c_a_bc = 2.0 * (1.0 - purity(partial_trace(psi, 0)))
    c_ab = wootters_concurrence(partial_trace(psi, [0, 1]))
    c_ac = wootters_concurrence(partial_trace(psi, [0, 2]))
    return float(c_a_bc - c_ab**2 - c_ac**2)


@dataclass(frozen=True)
class GeometricResult:
    value: float
    overlap: float
    factors: tuple[np.ndarray, ...]
    restart_overlaps: tuple[float, ...]

    @property
    def restart_agreement(self) -> float:
        """Fraction of restarts that reached the best overlap within 1e-8."""
        best = max(self.restart_overlaps)
        return sum(o >= best - 1e-8 for o in self.restart_overlaps) / len(self.restart_overlaps)


def _als_rank1(t: np.ndarray, vecs: list[np.ndarray], tol: float, max_iters: int):
    """Alternating maximisation of |<a b c|psi>|; each sweep cannot lower the overlap."""
    n = t.ndim
    letters = "abcdefgh"[:n]
    overlap = -1.0
    history = []
    for _ in range(max_iters):
        for k in range(n):
            ops = [t] + [vecs[j].conj() for j in range(n) if j != k]
            spec = letters + "," + ",".join(letters[j] for j in range(n) if j != k) + "->" + letters[k]
            v = np.einsum(spec, *ops)
            nv = np.linalg.norm(v)
            if nv == 0:
                break
            vecs[k] = v / nv
        new = float(nv**2)
        history.append(new)
        if new - overlap < tol:
            overlap = max(overlap, new)
            break
        overlap = new
    return overlap, vecs, history


def geometric_measure_report(
    psi: Ket, restarts: int = 32, tol: float = 1e-10, seed: int = 0, max_iters: int = 2000
) -> GeometricResult:
    """``1 - max |<a b c|psi>|^2`` over product states via alternating updates."""
    t = psi.tensor_view()
    rng_seeds = np.random.SeedSequence(seed).spawn(restarts)
    best = (-1.0, None)
    overlaps = []
    for i, ss in enumerate(rng_seeds):
        if i == 0:
            # leading singular vectors of each unfolding
            vecs = []
            for k in range(t.ndim):
                u, _, _ = np.linalg.svd(np.moveaxis(t, k, 0).reshape(t.shape[k], -1))
                vecs.append(u[:, 0])
        else:
            rng = np.random.default_rng(ss)
            vecs = []
            for d in t.shape:
                v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
                vecs.append(v / np.linalg.norm(v))
        ov, vecs, _ = _als_rank1(t, vecs, tol, max_iters)
        overlaps.append(ov)
        if ov > best[0]:
            best = (ov, tuple(vecs))
    ov = min(best[0], 1.0)
    return GeometricResult(1.0 - ov, ov, best[1], tuple(overlaps))


def geometric_measure_pure(psi: Ket, restarts: int = 32, tol: float = 1e-10, seed: int = 0) -> float:
    return geometric_measure_report(psi, restarts, tol, seed).value


# ---------------------------------------------------------------------------
# unification and hierarchy


class Condition(str, Enum):
    UNIFICATION = "unification"
    HIERARCHY = "hierarchy"


@dataclass(frozen=True)
class ConditionReport:
    condition: Condition
    kind: MeasureKind
    values: dict[str, float]
    slacks: dict[str, float] = field(default_factory=dict)

    @property
    def worst_gap(self) -> float:
        return min(self.slacks.values())

    @property
    def holds(self) -> bool:
        return self.worst_gap >= -CONDITION_TOL


def check_condition(psi: Ket, kind: MeasureKind, condition, config=None) -> ConditionReport:
    """Evaluate the unification or hierarchy condition on a pure three-party state.

    Unification checks invariance under all six party permutations and that the
    tripartite value dominates each two-party marginal (mixed marginals go through
    the convex roof with ``config``). Hierarchy checks
    ``E3 >= E2(X|YZ) >= E3-2`` on every single-party cut; for concurrence the
    comparison is made on squared values. The lower bound ``E2(X|YZ) >= E3-2``
    holds by definition of ``E3-2`` as the smallest cut, so only ``E3 - E2(X|YZ)``
    enters the slacks.
    """
    condition = Condition(condition)
    if psi.nparties != 3:
        raise UsageError("conditions are evaluated on 3-party kets")
    e3 = measure_pure_tripartite(psi, kind)
    values = {"E3": e3}
    slacks: dict[str, float] = {}
    square = kind.kind is Kind.CONCURRENCE

    if condition is Condition.UNIFICATION:
        worst = 0.0
        for perm in itertools.permutations(range(3)):
            v = measure_pure_tripartite(permute(psi, perm), kind)
            values["E3" + "".join(_LETTERS[k] for k in perm)] = v
            worst = max(worst, abs(v - e3))
        slacks["permutation"] = -worst
        for pair in ((0, 1), (0, 2), (1, 2)):
            label = "".join(_LETTERS[k] for k in pair)
            v = pair_value(partial_trace(psi, pair), kind.bipartite_counterpart, config)
            values[label] = v
            slacks["E3-" + label] = (e3**2 - v**2) if square else e3 - v
        return ConditionReport(condition, kind, values, slacks)

    cuts = cut_values(psi, kind)
    values.update(cuts)
    low = min(cuts.values())
    values["E3-2"] = low
    for label, v in cuts.items():
        slacks["E3-" + label] = (e3**2 - v**2) if square else e3 - v
    return ConditionReport(condition, kind, values, slacks)


def pair_value(rho: State, kind: MeasureKind, config=None) -> float:
    """Two-party value of a possibly mixed state: closed form, pure formula, or roof."""
    from .convexroof import convex_roof
    from .qcore import rank

    rho = as_density(rho)
    if kind.kind is Kind.NEGATIVITY:
        return unified_negativity(rho)
    if rank(rho) == 1:
        w, v = np.linalg.eigh(rho.matrix)
        return measure_pure_bipartite(Ket(v[:, -1], rho.dims, normalize=True), kind)
    return convex_roof(rho, kind, "bipartite", "min", config).value

"""Monogamy audits, exponent estimation, disentangled-state factorisation and spectral checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .convexroof import RoofConfig, convex_roof
from .measures import (
    EOF,
    Kind,
    KindError,
    MeasureKind,
    measure_pure_bipartite,
    measure_pure_tripartite,
    negativity_mixed,
    parse_cut,
    unified_negativity,
)
from .qcore import (
    RANK_TOL,
    DensityOperator,
    Ket,
    State,
    UsageError,
    as_density,
    merge,
    partial_trace,
    purity,
    rank,
    tensor,
)

FLAG_TOL = 1e-6
PAIR_ZERO = 1e-6
ALPHA_FLOOR = 1e-3
ALPHA_CEILING = 64.0
PRODUCT_TOL = 1e-8

_PAIRS = ((0, 1), (0, 2), (1, 2))
_CUTS = ((0, (1, 2)), (1, (0, 2)), (2, (0, 1)))


def _pair_key(labels: str, pair) -> str:
    return "".join(sorted(labels[k] for k in pair))


def _cut_key(labels: str, x: int, rest) -> str:
    return labels[x] + "|" + "".join(sorted(labels[k] for k in rest))


@dataclass(frozen=True)
class MonogamyReport:
    measure: MeasureKind
    alpha: float
    tripartite_value: float
    pair_values: dict[str, float]
    cut_values: dict[str, float]
    labels: str = "ABC"
    converged: bool = True
    flag_tol: float = FLAG_TOL

    @property
    def complete_gap(self) -> float:
        """E3^a - sum over pairs of E2^a."""
        a = self.alpha
        return self.tripartite_value**a - sum(v**a for v in self.pair_values.values())

    @property
    def tight_gap_per_cut(self) -> dict[str, float]:
        """E3^a - E2(X|YZ)^a - E2(YZ)^a for each single-party cut."""
        a = self.alpha
        out = {}
        for x, rest in _CUTS:
            ck = _cut_key(self.labels, x, rest)
            pk = _pair_key(self.labels, rest)
            out[ck] = self.tripartite_value**a - self.cut_values[ck] ** a - self.pair_values[pk] ** a
        return out

    @property
    def disentangling_flags(self) -> dict[str, bool]:
        """Equalities that signal a disentangled party, within ``flag_tol``.

        ``E3=XY``: tripartite value equals a pair value. ``E3=X|YZ``: it equals a cut
        value. ``X|YZ=XY``: a cut value equals the pair value of one of its parties.
        """
        t, tol = self.tripartite_value, self.flag_tol
        flags = {}
        for pair in _PAIRS:
            k = _pair_key(self.labels, pair)
            flags["E3=" + k] = abs(t - self.pair_values[k]) <= tol
        for x, rest in _CUTS:
            ck = _cut_key(self.labels, x, rest)
            flags["E3=" + ck] = abs(t - self.cut_values[ck]) <= tol
        for x, rest in _CUTS:
            ck = _cut_key(self.labels, x, rest)
            for y in rest:
                pk = _pair_key(self.labels, (x, y))
                flags[ck + "=" + pk] = abs(self.cut_values[ck] - self.pair_values[pk]) <= tol
        return flags

    def rows(self) -> list[tuple[str, float]]:
        out = [("tripartite", self.tripartite_value)]
        out += [("pair " + k, v) for k, v in self.pair_values.items()]
        out += [("cut " + k, v) for k, v in self.cut_values.items()]
        out.append(("complete_gap", self.complete_gap))
        out += [("tight_gap " + k, v) for k, v in self.tight_gap_per_cut.items()]
        return out


def _two_party_value(rho: DensityOperator, kind: MeasureKind, config) -> tuple[float, bool]:
    if kind.kind is Kind.NEGATIVITY:
        return unified_negativity(rho), True
    if rank(rho) == 1:
        w, v = np.linalg.eigh(rho.matrix)
        return measure_pure_bipartite(Ket(v[:, -1], rho.dims, normalize=True), kind), True
    res = convex_roof(rho, kind, "bipartite", "min", config)
    return res.value, res.converged


def _tripartite_value(state: State, kind: MeasureKind, config) -> tuple[float, bool]:
    rho = as_density(state)
    if isinstance(state, Ket) or rank(rho) == 1:
        if not isinstance(state, Ket):
            w, v = np.linalg.eigh(rho.matrix)
            state = Ket(v[:, -1], rho.dims, normalize=True)
        return measure_pure_tripartite(state, kind), True
    if kind.kind is Kind.NEGATIVITY:
        return negativity_mixed(rho, "tripartite"), True
    if not kind.is_roof:
        raise KindError(f"{kind.label} has no mixed-state tripartite value here")
    res = convex_roof(rho, kind, "tripartite", "min", config)
    return res.value, res.converged


def audit(
    rho: State,
    kind: MeasureKind,
    alpha: float = 1.0,
    config: RoofConfig | None = None,
    flag_tol: float = FLAG_TOL,
    labels: str = "ABC",
) -> MonogamyReport:
    """Tripartite, pair and cut values of a three-party state under ``kind``."""
    if alpha <= 0:
        raise UsageError(f"alpha must be positive, got {alpha}")
    if len(rho.dims) != 3:
        raise UsageError(f"audit needs a 3-party state, got dims {list(rho.dims)}")
    if len(labels) != 3:
        raise UsageError("labels must name three parties")
    config = config or RoofConfig()
    bk = kind.bipartite_counterpart
    t, ok = _tripartite_value(rho, kind, config)
    converged = ok
    pairs = {}
    for pair in _PAIRS:
        v, ok = _two_party_value(partial_trace(rho, pair), bk, config)
        pairs[_pair_key(labels, pair)] = v
        converged &= ok
    cuts = {}
    for x, rest in _CUTS:
        view = as_density(merge(rho, [[x], list(rest)]))
        if isinstance(rho, Ket):
            v = measure_pure_bipartite(merge(rho, [[x], list(rest)]), bk)
        else:
            v, ok = _two_party_value(view, bk, config)
            converged &= ok
        cuts[_cut_key(labels, x, rest)] = v
    return MonogamyReport(kind, float(alpha), t, pairs, cuts, labels, bool(converged), flag_tol)


@dataclass(frozen=True)
class ExponentEstimate:
    alpha_star: float
    bracket: tuple[float, float]
    samples: int
    violations: int
    ceiling_hits: int = 0
    per_sample: tuple[float, ...] = field(default=())

    @property
    def at_floor(self) -> bool:
        return self.alpha_star <= ALPHA_FLOOR


def critical_alpha(total: float, pairs: Sequence[float], tol: float = 1e-6) -> tuple[float, float, str]:
    """Smallest alpha in [floor, ceiling] with ``total^a >= sum pairs^a``.

    Returns ``(low, high, status)`` with status ``floor``, ``bisect``, ``ceiling``
    or ``violation`` (no finite alpha: the total equals one pair while another is nonzero).
    """
    pairs = [max(0.0, p) for p in pairs]
    live = [p for p in pairs if p > PAIR_ZERO]
    if any(abs(total - p) <= FLAG_TOL for p in pairs) and len(live) >= 2:
        return np.inf, np.inf, "violation"
    if live and total < max(live) - FLAG_TOL:
        return np.inf, np.inf, "violation"
    if len(live) <= 1:
        return ALPHA_FLOOR, ALPHA_FLOOR, "floor"
    ratios = np.array(live) / total

    def slack(a):
        return 1.0 - float(np.sum(ratios**a))

    if slack(ALPHA_FLOOR) >= 0:
        return ALPHA_FLOOR, ALPHA_FLOOR, "floor"
    if slack(ALPHA_CEILING) < 0:
        return ALPHA_CEILING, np.inf, "ceiling"
    lo, hi = ALPHA_FLOOR, ALPHA_CEILING
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if slack(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return lo, hi, "bisect"


def monogamy_exponent(
    samples: Sequence[State],
    kind: MeasureKind,
    tol: float = 1e-6,
    config: RoofConfig | None = None,
) -> ExponentEstimate:
    """Largest per-sample critical exponent of the complete monogamy power inequality."""
    samples = list(samples)
    if not samples:
        raise UsageError("monogamy_exponent needs at least one sample")
    best = (-1.0, (ALPHA_FLOOR, ALPHA_FLOOR))
    violations = ceiling = 0
    per = []
    for s in samples:
        rep = audit(s, kind, 1.0, config)
        lo, hi, status = critical_alpha(rep.tripartite_value, list(rep.pair_values.values()), tol)
        if status == "violation":
            violations += 1
            per.append(np.inf)
            continue
        if status == "ceiling":
            ceiling += 1
        per.append(hi if np.isfinite(hi) else lo)
        if per[-1] > best[0]:
            best = (per[-1], (lo, hi))
    if best[0] < 0:
        best = (np.inf, (np.inf, np.inf))
    return ExponentEstimate(float(best[0]), best[1], len(samples), violations, ceiling, tuple(per))


# ---------------------------------------------------------------------------
# factorisation of states with a product outer marginal


@dataclass(frozen=True)
class Factorization:
    """``(I x U x I)|psi> = |left>_{X B1} |right>_{B2 Z}`` with ``X < Z`` the outer parties."""

    pivot: int
    split_dims: tuple[int, int]
    local_unitary: np.ndarray
    factors: tuple[Ket, Ket]
    residual: float

    @property
    def success(self) -> bool:
        return self.residual <= PRODUCT_TOL


@dataclass(frozen=True)
class NotProduct:
    pivot: int
    deviation: float

    success = False


def _eig_desc(rho: DensityOperator):
    w, v = np.linalg.eigh(rho.matrix)
    return np.clip(w[::-1], 0, None), v[:, ::-1]


def factorize_pure(psi: Ket, pivot: int = 1):
    """Split ``psi`` as ``|.>_{X B1} |.>_{B2 Z}`` across the pivot party, if ``rho_XZ`` is product."""
    if psi.nparties != 3:
        raise UsageError("factorize_pure needs a 3-party ket")
    if pivot not in (0, 1, 2):
        raise UsageError(f"pivot must be 0, 1 or 2, got {pivot}")
    x, z = [k for k in range(3) if k != pivot]
    rho_xz = partial_trace(psi, [x, z])
    rho_x = partial_trace(psi, x)
    rho_z = partial_trace(psi, z)
    dev = float(np.linalg.norm(rho_xz.matrix - np.kron(rho_x.matrix, rho_z.matrix)))
    if dev > PRODUCT_TOL:
        return NotProduct(pivot, dev)

    t = np.transpose(psi.tensor_view(), (x, pivot, z))  # X, B, Z
    wx, ux = _eig_desc(rho_x)
    wz, uz = _eig_desc(rho_z)
    m = max(1, int(np.sum(wx > RANK_TOL)))
    n = max(1, int(np.sum(wz > RANK_TOL)))
    a, c = np.sqrt(wx[:m]), np.sqrt(wz[:n])
    db = psi.dims[pivot]
    # columns psi_ij = <u_i v_j|psi> / (a_i c_j), index i*n + j
    cols = np.einsum("xi,xbz,zj->bij", ux[:, :m].conj(), t, uz[:, :n].conj())
    cols = (cols / (a[:, None] * c[None, :])[None]).reshape(db, m * n)
    # tidy the Schmidt vectors into an orthonormal set (deterministic QR)
    q, r = np.linalg.qr(cols)
    q = q * np.sign(np.real(np.diagonal(r)) + (np.real(np.diagonal(r)) == 0))
    full, _ = np.linalg.qr(np.hstack([q, np.eye(db, dtype=complex)]))
    full[:, : m * n] = q
    u = full.conj().T  # sends psi_ij to basis vector i*n + j
    left = (ux[:, :m] * a).reshape(-1)  # sum_i a_i |u_i>|i>
    right = (uz[:, :n] * c).T.reshape(-1)  # sum_j c_j |j>|v_j>
    fx = Ket(left, (psi.dims[x], m), normalize=True)
    fz = Ket(right, (n, psi.dims[z]), normalize=True)

    rotated = np.einsum("cb,xbz->xcz", u, t)
    prod_t = np.einsum("xi,jz->xijz", fx.amplitudes.reshape(psi.dims[x], m), fz.amplitudes.reshape(n, psi.dims[z]))
    embedded = np.zeros_like(rotated)
    embedded[:, : m * n, :] = prod_t.reshape(psi.dims[x], m * n, psi.dims[z])
    residual = float(np.linalg.norm(rotated - embedded))
    return Factorization(pivot, (m, n), u, (fx, fz), residual)


# ---------------------------------------------------------------------------
# purity inequality


@dataclass(frozen=True)
class PurityReport:
    tr2_ab: float
    tr2_a: float
    tr2_b: float
    structural: bool

    @property
    def lhs(self) -> float:
        return 1.0 + max(self.tr2_a, self.tr2_b) * self.tr2_ab

    @property
    def slack(self) -> float:
        return self.lhs - self.tr2_a - self.tr2_b

    @property
    def strict_slack(self) -> float:
        """``1 + Tr rho_AB^2 - Tr rho_A^2 - Tr rho_B^2`` (zero exactly in the equality case)."""
        return 1.0 + self.tr2_ab - self.tr2_a - self.tr2_b

    @property
    def equality_case(self) -> bool:
        return self.strict_slack <= 1e-9


def purity_inequality(rho: State, cut=None) -> PurityReport:
    """Purities entering ``1 + max(P_A, P_B) P_AB >= P_A + P_B``.

    ``structural`` records whether ``rho`` is ``rho_A x rho_B`` with a pure factor.
    """
    rho = as_density(rho)
    groups = parse_cut(cut, rho.nparties)
    view = as_density(merge(rho, groups)) if rho.nparties != 2 or groups != [[0], [1]] else rho
    ra, rb = partial_trace(view, 0), partial_trace(view, 1)
    pa, pb, pab = purity(ra), purity(rb), purity(view)
    prod_dev = np.linalg.norm(view.matrix - np.kron(ra.matrix, rb.matrix))
    structural = bool(prod_dev <= 1e-9 and max(pa, pb) >= 1 - 1e-9)
    return PurityReport(pab, pa, pb, structural)


# ---------------------------------------------------------------------------
# two-qubit marginal spectra


@dataclass(frozen=True)
class SpectrumCheck:
    """Existence test for a two-qubit state with given joint and marginal spectra."""

    slacks: tuple[float, float, float]
    tol: float = 1e-12

    @property
    def compatible(self) -> bool:
        return all(s >= -self.tol for s in self.slacks)

    @property
    def failing(self) -> list[str]:
        names = (
            "min(lA,lB) >= l3+l4",
            "lA+lB >= l2+l3+2*l4",
            "|lA-lB| <= min(l1-l3, l2-l4)",
        )
        return [n for n, s in zip(names, self.slacks) if s < -self.tol]

    def __bool__(self) -> bool:
        return self.compatible


def marginal_compatibility(spectrum: Sequence[float], lambda_a: float, lambda_b: float) -> SpectrumCheck:
    """Check the three inequalities on the joint spectrum and minimal marginal eigenvalues."""
    lam = np.asarray(spectrum, dtype=float)
    if lam.shape != (4,):
        raise UsageError(f"joint spectrum must have 4 entries, got {lam.shape}")
    if np.any(np.diff(lam) > 1e-12) or lam[-1] < -1e-12 or abs(lam.sum() - 1) > 1e-9:
        raise UsageError("joint spectrum must be descending, nonnegative and sum to 1")
    for v in (lambda_a, lambda_b):
        if not -1e-12 <= v <= 0.5 + 1e-12:
            raise UsageError(f"minimal marginal eigenvalue {v} outside [0, 1/2]")
    l1, l2, l3, l4 = lam
    s1 = min(lambda_a, lambda_b) - (l3 + l4)
    s2 = lambda_a + lambda_b - (l2 + l3 + 2 * l4)
    s3 = min(l1 - l3, l2 - l4) - abs(lambda_a - lambda_b)
    return SpectrumCheck((float(s1), float(s2), float(s3)))


# ---------------------------------------------------------------------------
# additivity

ADDITIVITY_MAX_DIM = 16


def _is_pure(rho: State) -> bool:
    return isinstance(rho, Ket) or rank(rho) == 1


def _as_ket(rho: State) -> Ket:
    if isinstance(rho, Ket):
        return rho
    w, v = np.linalg.eigh(rho.matrix)
    return Ket(v[:, -1], rho.dims, normalize=True)


def _value(rho: State, kind: MeasureKind, scope: str, config) -> float:
    if _is_pure(rho):
        psi = _as_ket(rho)
        return measure_pure_tripartite(psi, kind) if scope == "tripartite" else measure_pure_bipartite(psi, kind)
    return convex_roof(rho, kind, scope, "min", config).value


def additivity_gap(
    rho1: State,
    rho2: State,
    kind: MeasureKind = EOF,
    scope: str = "bipartite",
    config: RoofConfig | None = None,
) -> float:
    """``E(rho1 x rho2) - E(rho1) - E(rho2)`` with parties paired up (AA'|BB' or AA'|BB'|CC')."""
    if kind.kind is not Kind.EOF:
        raise KindError("additivity is audited for entanglement of formation only")
    k = {"bipartite": 2, "tripartite": 3}.get(scope)
    if k is None:
        raise UsageError(f"unknown scope {scope!r}")
    if len(rho1.dims) != k or len(rho2.dims) != k:
        raise UsageError(f"{scope} additivity needs {k}-party inputs")
    pure1, pure2 = _is_pure(rho1), _is_pure(rho2)
    groups = [[i, i + k] for i in range(k)]
    if pure1 and pure2:
        joint = merge(tensor(_as_ket(rho1), _as_ket(rho2)), groups)
    else:
        total = prod(rho1.dims) * prod(rho2.dims)
        if not (pure1 or pure2) and total > ADDITIVITY_MAX_DIM:
            raise UsageError(f"mixed x mixed additivity is limited to total dimension {ADDITIVITY_MAX_DIM}")
        joint = merge(tensor(as_density(rho1), as_density(rho2)), groups)
    config = config or RoofConfig()
    return _value(joint, kind, scope, config) - _value(rho1, kind, scope, config) - _value(rho2, kind, scope, config)


# ---------------------------------------------------------------------------
# spectral witnesses on a two-party marginal


def sqrt_trace_witness(rho: State) -> float:
    """``1 + Tr^2 sqrt(rho_BC) - Tr^2 sqrt(rho_B) - Tr^2 sqrt(rho_C)`` for a two-party state.

    On a purification ``|psi>^{ABC}`` this compares the negativity-type cut values,
    so a positive value signals a broken hierarchy for the roof negativity.
    """
    from .qcore import sqrt_trace

    rho = as_density(rho)
    if rho.nparties != 2:
        raise UsageError("sqrt_trace_witness needs a two-party state")
    return (
        1.0
        + sqrt_trace(rho) ** 2
        - sqrt_trace(partial_trace(rho, 0)) ** 2
        - sqrt_trace(partial_trace(rho, 1)) ** 2
    )


def purity_product_witness(rho: State) -> tuple[float, float]:
    """``(Tr rho_B^2 Tr rho_C^2, Tr rho_BC^2)``; the first below the second breaks the tau' hierarchy."""
    rho = as_density(rho)
    if rho.nparties != 2:
        raise UsageError("purity_product_witness needs a two-party state")
    return purity(partial_trace(rho, 0)) * purity(partial_trace(rho, 1)), purity(rho)

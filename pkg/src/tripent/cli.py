"""``tripent`` command line: measure, audit, construct, verify.

Exit codes: 0 success, 1 verification failure, 2 unreadable input or state file,
3 bad parameters, 4 optimizer did not converge, 5 infeasible spectrum target.
"""
from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

import numpy as np

from .convexroof import RoofConfig, convex_roof
from .io import RunRecord, StateFile, StateFileError, append_csv, gap_curve_svg, parse_ints, parse_real, parse_reals
from .measures import (
    Kind,
    MeasureKind,
    geometric_measure_report,
    measure_pure,
    negativity_mixed,
    unified_negativity,
)
from .monogamy import ALPHA_CEILING, ALPHA_FLOOR, audit, monogamy_exponent
from .qcore import DensityOperator, Ket, TripentError, rank
from .states import (
    Infeasible,
    MemsSpec,
    NotFound,
    SpectrumTarget,
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
from .suites import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_PARAM, EXIT_NOCONV, EXIT_INFEASIBLE = 0, 1, 2, 3, 4, 5


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _kind(args) -> MeasureKind:
    return MeasureKind.parse(args.kind, q=args.q, alpha=getattr(args, "renyi_alpha", None))


def _config(args) -> RoofConfig:
    return RoofConfig(
        ensemble_size=args.ensemble_size,
        restarts=args.restarts,
        max_iters=args.max_iters,
        rel_tol=args.rel_tol,
        seed=args.seed,
        workers=args.workers,
    )


def _load(path: str):
    sf = StateFile.read(path)
    return sf, sf.to_state()


def _as_pure(state):
    if isinstance(state, Ket):
        return state
    if rank(state) == 1:
        w, v = np.linalg.eigh(state.matrix)
        return Ket(v[:, -1], state.dims, normalize=True)
    return None


def _resolve_scope(scope: str, nparties: int) -> str:
    if scope == "auto":
        return "tripartite" if nparties == 3 else "bipartite"
    return scope


# ---------------------------------------------------------------------------
# measure


def cmd_measure(args) -> int:
    t0 = time.perf_counter()
    sf, state = _load(args.state)
    kind = _kind(args)
    scope = _resolve_scope(args.scope, len(state.dims))
    config = _config(args)
    psi = _as_pure(state)
    converged = True
    if psi is not None and args.direction == "min":
        if kind.kind is Kind.GEOMETRIC:
            value = geometric_measure_report(psi, restarts=args.restarts, seed=args.seed).value
        else:
            value = measure_pure(psi, kind, scope, args.cut)
    elif kind.kind is Kind.NEGATIVITY:
        value = negativity_mixed(state, "tripartite") if scope == "tripartite" else unified_negativity(state, args.cut)
    else:
        res = convex_roof(state, kind, scope, args.direction, config, args.cut)
        value, converged = res.value, res.converged
    rec = RunRecord("measure", {"kind": kind.label, "scope": scope, "cut": args.cut, "direction": args.direction}, args.seed)
    rec.add("value", value)
    rec.wall_time = time.perf_counter() - t0
    print(f"value {_fmt(value)}")
    print(f"converged {str(converged).lower()}")
    if not converged:
        print("warning roof optimizer hit max_iters before the stopping rule", file=sys.stderr)
    if args.csv:
        append_csv(args.csv, [_row("measure", sf.label, kind, scope, None, "value", value, args.seed, converged)])
    if args.record:
        with open(args.record, "w", encoding="utf-8") as fh:
            fh.write(rec.to_json() + "\n")
    return EXIT_OK if converged else EXIT_NOCONV


def _row(command, label, kind, scope, alpha, name, value, seed, converged) -> dict:
    return {
        "command": command, "label": label, "kind": kind.label, "scope": scope, "alpha": alpha,
        "name": name, "value": repr(float(value)), "seed": seed, "converged": str(converged).lower(),
    }


# ---------------------------------------------------------------------------
# audit


def _samples(args):
    if args.random:
        dims = parse_ints(args.random)
        if len(dims) != 3:
            raise _Exit(EXIT_PARAM, "--random needs three dims, e.g. 2,2,2")
        streams = np.random.SeedSequence(args.seed).spawn(args.samples)
        return None, [random_pure(dims, np.random.default_rng(s)) for s in streams]
    if not args.state:
        raise _Exit(EXIT_PARAM, "audit needs a state file or --random")
    sf, state = _load(args.state)
    return sf.label, [state]


def cmd_audit(args) -> int:
    label, samples = _samples(args)
    kind = _kind(args)
    config = _config(args)
    rows, converged = [], True
    if args.find_exponent:
        est = monogamy_exponent(samples, kind, args.tol, config)
        lo, hi = est.bracket
        print(f"{'samples':<16}{est.samples}")
        print(f"{'alpha_star':<16}{_fmt(est.alpha_star)}")
        print(f"{'bracket':<16}[{_fmt(lo)}, {_fmt(hi)}]")
        print(f"{'violations':<16}{est.violations}")
        print(f"{'ceiling_hits':<16}{est.ceiling_hits}")
        if est.at_floor:
            print(f"bracket floor hit: every alpha >= {ALPHA_FLOOR:g} satisfies the inequality")
        rows.append(_row("audit", label, kind, "tripartite", None, "alpha_star", est.alpha_star, args.seed, True))
        reports = []
    else:
        reports = [audit(s, kind, args.alpha, config, args.flag_tol, args.labels) for s in samples]
        for i, rep in enumerate(reports):
            if len(reports) > 1:
                print(f"# sample {i}")
            width = max(len(n) for n, _ in rep.rows()) + 2
            for name, value in rep.rows():
                print(f"{name:<{width}}{_fmt(value)}")
                rows.append(_row("audit", label, kind, "tripartite", args.alpha, name, value, args.seed, rep.converged))
            set_flags = [k for k, v in rep.disentangling_flags.items() if v]
            print(f"{'flags':<{width}}{' '.join(set_flags) if set_flags else '-'}")
            print(f"{'converged':<{width}}{str(rep.converged).lower()}")
            converged &= rep.converged
    if args.svg:
        rep = reports[0] if reports else audit(samples[0], kind, 1.0, config, args.flag_tol, args.labels)
        alphas = np.logspace(np.log10(ALPHA_FLOOR), np.log10(ALPHA_CEILING), 200)
        t = rep.tripartite_value
        pairs = np.array([v for v in rep.pair_values.values()])
        if t > 0:
            gaps = [1.0 - float(np.sum((pairs / t) ** a)) for a in alphas]
        else:
            gaps = [0.0 for _ in alphas]
        svg = gap_curve_svg(alphas, gaps, f"{kind.label}: complete monogamy gap", "1 - sum (E_pair / E3)^alpha")
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg)
    if args.csv:
        append_csv(args.csv, rows)
    return EXIT_OK if converged else EXIT_NOCONV


# ---------------------------------------------------------------------------
# construct


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise _Exit(EXIT_PARAM, f"--family {args.family} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))


def cmd_construct(args) -> int:
    fam = args.family
    if fam == "ghz":
        state = ghz(args.d or 2, args.parties or 3)
    elif fam == "w":
        state = w_state()
    elif fam == "gghz":
        _need(args, "lams")
        state = generalized_ghz(parse_reals(args.lams))
    elif fam in ("mems", "mems-ext"):
        _need(args, "m", "r")
        spec = MemsSpec(args.m, args.r, parse_reals(args.probs) if args.probs else None)
        state = mems(spec) if fam == "mems" else mems_extension_pure(spec)
    elif fam == "double-mems":
        _need(args, "m", "r", "l")
        state = double_mems(args.m, args.r, args.l)
    elif fam == "random":
        _need(args, "dims")
        dims = parse_ints(args.dims)
        rng = np.random.default_rng(args.seed)
        state = random_pure(dims, rng) if args.rank is None else random_mixed(dims, args.rank, rng)
    elif fam == "spectra-target":
        _need(args, "joint", "la", "lb")
        target = SpectrumTarget(parse_reals(args.joint), parse_real(args.la), parse_real(args.lb))
        state = state_with_spectra(target, seed=args.seed, max_iters=args.max_iters)
        if isinstance(state, Infeasible):
            raise _Exit(EXIT_INFEASIBLE, "infeasible spectra: violates " + "; ".join(state.failing))
        if isinstance(state, NotFound):
            raise _Exit(EXIT_NOCONV, f"no state found, best marginal error {state.best_residual:.3g}")
    else:  # argparse restricts the choices
        raise _Exit(EXIT_PARAM, f"unknown family {fam}")
    sf = StateFile.from_state(state, args.label)
    if args.out:
        sf.write(args.out)
    else:
        sys.stdout.write(sf.dumps())
    kind = "pure" if isinstance(state, Ket) else "mixed"
    print(f"wrote {kind} state dims {list(state.dims)}" + (f" to {args.out}" if args.out else ""), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, seed=args.seed, workers=args.workers)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{args.suite}: {len(checks) - failed}/{len(checks)} checks passed")
    if args.csv:
        rows = [
            {"command": "verify", "label": args.suite, "kind": "", "scope": "", "alpha": "", "name": c.name,
             "value": repr(float(c.measured)), "seed": args.seed, "converged": str(c.passed).lower()}
            for c in checks
        ]
        append_csv(args.csv, rows)
    return EXIT_OK if failed == 0 else EXIT_VERIFY


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Exit(EXIT_PARSE, f"{self.prog}: error: {message}")


def _roof_flags(p):
    g = p.add_argument_group("convex roof")
    g.add_argument("--restarts", type=int, default=16)
    g.add_argument("--ensemble-size", type=int, default=None)
    g.add_argument("--max-iters", type=int, default=400)
    g.add_argument("--rel-tol", type=float, default=1e-7)
    g.add_argument("--workers", type=int, default=None, help="thread count (default from TRIPENT_WORKERS, else 1)")
    g.add_argument("--seed", type=int, default=0)


def _kind_flags(p):
    p.add_argument("--kind", required=True, help="eof, concurrence, tangle, tsallis, renyi, negativity, "
                   "negativity-roof, tau-prime, three-tangle, geometric")
    p.add_argument("--q", type=parse_real, default=None, help="Tsallis order")
    p.add_argument("--renyi-alpha", type=parse_real, default=None, help="Renyi order in (0, 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tripent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", help="evaluate one measure on a state file")
    p.add_argument("state")
    _kind_flags(p)
    p.add_argument("--scope", choices=["auto", "bipartite", "tripartite"], default="auto")
    p.add_argument("--cut", default=None, help="bipartition such as A|BC (bipartite scope)")
    p.add_argument("--direction", choices=["min", "max"], default="min")
    p.add_argument("--csv", default=None)
    p.add_argument("--record", default=None, help="write a JSON run record here")
    _roof_flags(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("audit", help="monogamy audit of a state file or random samples")
    p.add_argument("state", nargs="?")
    _kind_flags(p)
    p.add_argument("--alpha", type=parse_real, default=1.0)
    p.add_argument("--find-exponent", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6, help="bisection tolerance for --find-exponent")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--random", default=None, help="audit Haar-random pure states with these dims")
    p.add_argument("--flag-tol", type=float, default=1e-6)
    p.add_argument("--labels", default="ABC", help="letters naming the three stored parties")
    p.add_argument("--svg", default=None)
    p.add_argument("--csv", default=None)
    _roof_flags(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("construct", help="write a state file for a named family")
    p.add_argument("--family", required=True,
                   choices=["ghz", "w", "gghz", "mems", "mems-ext", "double-mems", "random", "spectra-target"])
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--parties", type=int, default=None)
    p.add_argument("--lams", default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--probs", default=None)
    p.add_argument("--dims", default=None)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--joint", default=None, help="four joint eigenvalues, fractions allowed")
    p.add_argument("--la", default=None)
    p.add_argument("--lb", default=None)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _Exit as exc:
        if str(exc):
            print(str(exc), file=sys.stderr)
        return exc.code
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except TripentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line to the terminal
(outside pytest's capture) so the summary is visible in a plain ``pytest`` run.
Suites are computed once serially and shared; criterion 10 reruns them with
two workers and compares every measured value bit for bit.
"""
import numpy as np
import pytest

from tripent.monogamy import purity_inequality
from tripent.states import random_mixed
from tripent.suites import SUITES, run_suite

SEED = 0


@pytest.fixture(scope="module")
def serial():
    return {name: run_suite(name, seed=SEED, workers=1) for name in SUITES}


def report(capsys, number, title, checks):
    ok = all(c.passed for c in checks)
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {title} ({sum(c.passed for c in checks)}/{len(checks)} checks)")
        for c in checks:
            if not c.passed:
                print("    " + c.line())
    return ok


def pick(checks, *needles):
    out = [c for c in checks if any(n in c.name for n in needles)]
    assert out, f"no checks matching {needles}"
    return out


def test_criterion_01_roof_matches_wootters(serial, capsys):
    checks = serial["oracle"]
    assert len(checks) == 50
    assert all(c.tol == 1e-3 for c in checks)
    assert report(capsys, 1, "convex roof EoF vs Wootters on 50 random two-qubit states", checks)


def test_criterion_02_closed_forms(serial, capsys):
    checks = serial["closed-forms"]
    assert report(capsys, 2, "GHZ, W and Bell x |0> closed-form values", checks)


def test_criterion_03_hierarchy_split(serial, capsys):
    checks = serial["hierarchy"] + pick(serial["counterexample"], "sqrt-trace witness", "marginal fit", "compatible")
    witnesses = {c.name: c.expected for c in checks if "sqrt-trace" in c.name}
    assert witnesses == {"first sqrt-trace witness": 0.0506086, "second sqrt-trace witness": -0.1593927}
    assert report(capsys, 3, "hierarchy slack on random states and the two spectral witnesses", checks)


def test_criterion_04_tau_prime_witness(serial, capsys):
    checks = pick(serial["counterexample"], "tau' witness")
    assert len(checks) == 3
    assert report(capsys, 4, "tau' purity-product witness 0.4882813 < 0.5465088", checks)


def test_criterion_05_complete_monogamy(serial, capsys):
    checks = pick(serial["monogamy"], "complete gap", "violations")
    assert len(checks) == 3
    assert report(capsys, 5, "W and GHZ tangle audits, no violations over 100 states", checks)


def test_criterion_06_tight_monogamy(serial, capsys):
    checks = serial["tight-monogamy"]
    assert len(checks) == 8
    assert report(capsys, 6, "tight monogamy on 50 constructed states, four measures", checks)


def test_criterion_07_additivity(serial, capsys):
    checks = serial["additivity"]
    assert sum("x bell gap" in c.name and "rho[" in c.name for c in checks) == 10
    assert report(capsys, 7, "EoF additivity for rho x Bell and pure x pure", checks)


# The max-form bound fails on a small fraction of 2x2 states, so the sweep at
# the default seed passes by chance. The frozen state below is a counterexample.
COUNTEREXAMPLE = dict(dims=(2, 2), rank=4, seed=7)


@pytest.mark.xfail(strict=True, reason="max-form purity bound is false in general; see frozen counterexample")
def test_criterion_08_purity_bound(serial, capsys):
    from tripent.suites import Check

    checks = list(serial["purity-lemma"])
    rep = purity_inequality(random_mixed(**COUNTEREXAMPLE))
    checks.append(Check("purity lemma slack on frozen 2x2 counterexample", rep.slack, 0.0, 1e-9, ">="))
    assert report(capsys, 8, "purity bound over 1000 random states and its equality case", checks)


def test_criterion_09_mems_story(serial, capsys):
    checks = serial["mems-story"]
    e3 = next(c for c in checks if c.name == "mems-story mixed E3 = ln(mr)")
    assert e3.expected == pytest.approx(np.log(4))
    assert report(capsys, 9, "MEMS constructions and the eight EoF relations at m=r=l=2", checks)


def test_criterion_10_determinism(serial, capsys):
    from tripent.suites import Check

    checks = []
    for name in SUITES:
        again = run_suite(name, seed=SEED, workers=2)
        same = [a.name for a in serial[name]] == [b.name for b in again] and all(
            np.float64(a.measured).tobytes() == np.float64(b.measured).tobytes() for a, b in zip(serial[name], again)
        )
        checks.append(Check(f"{name} bit-identical with 1 and 2 workers", float(same), 1.0))
    assert report(capsys, 10, "all suites bit-identical across worker counts", checks)

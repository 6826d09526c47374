"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines are collected into the
terminal summary) or ``python tests/test_acceptance.py`` for the bare list.
Tolerances are the ones stated for each criterion and are not relaxed.
"""

from __future__ import annotations

import subprocess
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from dimerlab.cli import synthesize_grid
from dimerlab.continuum import (
    Modulus,
    elliptic_K,
    elliptic_Kp,
    hookup_probability,
    k_from_L,
    landen_check,
    poisson_identity_suite,
    prudnikov_pair,
    residue_identity,
    series_Y,
    series_Y_alt,
    series_Z,
    series_ZI,
    series_ZI_alt,
)
from dimerlab.oracle import GridSpec, count_matchings, exhaustive_hookup
from dimerlab.spectral import hookup_discrete, hookup_exact, monomer_count, q0_partition

PRECISION = 256


@dataclass(frozen=True)
class Outcome:
    passed: bool
    detail: str


def L_grid():
    """20 log-spaced aspect ratios on [0.2, 5]."""
    lo, hi = mpmath.log(mpf("0.2")), mpmath.log(mpf(5))
    return [mpmath.exp(lo + (hi - lo) * i / 19) for i in range(20)]


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def criterion_1() -> Outcome:
    start = time.perf_counter()
    bad = []
    cases = 0
    for M in range(2, 13, 2):
        for N in range(1, 12):
            cases += 1
            if q0_partition(GridSpec(M, N), PRECISION) != count_matchings((M, N)):
                bad.append((M, N))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60
    return Outcome(ok, f"{cases} grids, mismatches={bad}, {elapsed:.2f}s (limit 60s)")


def criterion_2() -> Outcome:
    bad = []
    cases = 0
    for M in range(2, 9, 2):
        for N in range(1, 8, 2):
            for n1 in range(1, N + 1):
                for n2 in range(1, N + 1):
                    if (n1 - n2) % 2:
                        continue
                    cases += 1
                    formula = monomer_count((M, N), n1, n2, PRECISION)
                    if formula != count_matchings((M, N), [(1, n1), (M, n2)]):
                        bad.append((M, N, n1, n2))
    return Outcome(not bad, f"{cases} monomer placements, mismatches={bad}")


def criterion_3() -> Outcome:
    notes = []
    ok = True
    for M, N in [(2, 3), (2, 5), (4, 3), (4, 5), (6, 5)]:
        rep = exhaustive_hookup((M, N))
        q11 = monomer_count((M, N), 1, 1, PRECISION)
        q1N = monomer_count((M, N), 1, N, PRECISION)
        # loop-weighted type II probability: each configuration weighs 2^(loops + closures)
        weighted = Fraction(2 * rep.n_typeII, rep.q0**2) / rep.z_dd_weighted
        P13 = hookup_exact((M, N), PRECISION)
        good = rep.n_typeI == q1N**2 and rep.n_total == q11**2 and weighted == P13
        ok &= good
        notes.append(f"{M}x{N}:P={P13}{'' if good else '(MISMATCH)'}")
    ok &= hookup_exact((2, 3)) == Fraction(3, 5)
    return Outcome(ok, " ".join(notes))


def criterion_4() -> Outcome:
    start = time.perf_counter()
    worst = mpf(0)
    with mpmath.workprec(PRECISION):
        for L in L_grid():
            Z, ZI, Y = series_Z(L), series_ZI(L), series_Y(L)
            worst = max(worst, rel(ZI, series_ZI_alt(L)), rel(Y, series_Y_alt(L)), rel(Z - ZI, series_Y_alt(L)))
    elapsed = time.perf_counter() - start
    ok = worst < mpf(10) ** -25 and elapsed < 5
    return Outcome(ok, f"max rel dev {mpmath.nstr(worst, 3)} (tol 1e-25), {elapsed:.2f}s (limit 5s)")


def criterion_5() -> Outcome:
    """Checked literally: 2k K(k)K'(k)/pi^2 and k1^2 K(k1)K'(k1)/pi^2."""
    worst = mpf(0)
    ratios = []
    with mpmath.workprec(PRECISION):
        pi2 = mpmath.pi**2
        for L in L_grid():
            m = k_from_L(L, PRECISION)
            y = series_Y(L)
            via_k = 2 * m.k * elliptic_K(m.k) * elliptic_Kp(m.k) / pi2
            k1 = Modulus.from_k(m.k1)
            via_k1 = m.k1**2 * elliptic_K(m.k1) * k1.Kp / pi2
            worst = max(worst, rel(y, via_k), rel(y, via_k1))
            ratios.append(y / via_k1)
    ok = worst < mpf(10) ** -20
    spread = max(ratios) - min(ratios)
    return Outcome(
        ok,
        f"max rel dev {mpmath.nstr(worst, 3)} (tol 1e-20); series/closed ratio "
        f"{mpmath.nstr(ratios[0], 12)} on every L (spread {mpmath.nstr(spread, 3)})",
    )


def criterion_6a() -> Outcome:
    worst = max(rel(series_ZI(L), series_Y(1 / L)) for L in L_grid())
    return Outcome(worst < mpf(10) ** -18, f"Z_I(L) vs Y(1/L): max rel dev {mpmath.nstr(worst, 3)} (tol 1e-18)")


def criterion_6b() -> Outcome:
    worst = max(abs(hookup_probability(L) + hookup_probability(1 / L) - 1) for L in L_grid())
    return Outcome(worst < mpf(10) ** -18, f"H(L)+H(1/L)=1: max dev {mpmath.nstr(worst, 3)} (tol 1e-18)")


def criterion_6c() -> Outcome:
    dev = abs(hookup_probability(1) - mpf(1) / 3)
    return Outcome(dev < mpf(10) ** -12, f"H(1)=1/3: dev {mpmath.nstr(dev, 3)} (tol 1e-12)")


def criterion_6d() -> Outcome:
    dev = abs(k_from_L(1).k - (3 - 2 * mpmath.sqrt(2)))
    return Outcome(dev < mpf(10) ** -12, f"k_from_L(1)=3-2sqrt2: dev {mpmath.nstr(dev, 3)} (tol 1e-12)")


def criterion_7() -> Outcome:
    tol20, tol25 = mpf(10) ** -20, mpf(10) ** -25
    alphas = [mpf("0.5"), mpf(1), mpf(2), mpmath.pi]
    b = max(poisson_identity_suite(a, m).max_deviation for a in alphas for m in (1, 2, 3))
    r = max(residue_identity(a).deviation for a in alphas)
    lan = max(landen_check(mpf(i) / 10).deviation for i in range(1, 10))
    pru = max(c.deviation for i in range(1, 10) for c in prudnikov_pair(mpf(i) / 10))
    ok = b < tol20 and r < tol20 and lan < tol25 and pru < tol20
    return Outcome(
        ok,
        f"cosh sums {mpmath.nstr(b, 3)}, residue {mpmath.nstr(r, 3)} (tol 1e-20); "
        f"landen {mpmath.nstr(lan, 3)} (tol 1e-25); prudnikov {mpmath.nstr(pru, 3)} (tol 1e-20)",
    )


def criterion_8() -> Outcome:
    start = time.perf_counter()
    errors = []
    for N in (3, 7, 15, 31, 63, 127):
        grid = synthesize_grid(mpf(1), N)
        errors.append(abs(hookup_discrete(grid, PRECISION).P - mpf(1) / 3))
    elapsed = time.perf_counter() - start
    decreasing = all(a > b for a, b in zip(errors, errors[1:]))
    ok = decreasing and errors[-1] <= errors[0] / 4 and elapsed < 120
    shown = ", ".join(mpmath.nstr(e, 4) for e in errors)
    return Outcome(ok, f"|P-1/3| = [{shown}], {elapsed:.2f}s (limit 120s)")


DETERMINISM_RUNS = [
    ["count", "--M", "8", "--N", "8", "--method", "both"],
    ["count", "--M", "2", "--N", "3", "--monomers", "1,1:2,1", "--method", "both"],
    ["hookup", "--M", "2", "--N", "3", "--oracle"],
    ["hookup", "--M", "64", "--N", "63"],
    ["continuum", "--L", "1"],
    ["continuum", "--L", "1e9", "--format", "csv"],
    ["converge", "--L", "1", "--N-sizes", "3,7,15,31,63"],
    ["converge", "--L", "1", "--N-sizes", "3,7", "--format", "json"],
    ["verify", "--suite", "all"],
]


def criterion_9() -> Outcome:
    differing = []
    for argv in DETERMINISM_RUNS:
        outs = [
            subprocess.run([sys.executable, "-m", "dimerlab", *argv], capture_output=True, check=False).stdout
            for _ in range(2)
        ]
        if outs[0] != outs[1] or not outs[0]:
            differing.append(" ".join(argv[:1]))
    return Outcome(not differing, f"{len(DETERMINISM_RUNS)} invocations run twice, differing={differing}")


CRITERIA = [
    ("1", "formula-oracle exactness", criterion_1),
    ("2", "monomer formula exactness", criterion_2),
    ("3", "swap-argument validation", criterion_3),
    ("4", "series rewrite chain", criterion_4),
    ("5", "elliptic closure (as stated)", criterion_5),
    ("6a", "duality Z_I(L)=Y(1/L)", criterion_6a),
    ("6b", "duality H(L)+H(1/L)=1 (as stated)", criterion_6b),
    ("6c", "self-dual value H(1)", criterion_6c),
    ("6d", "self-dual modulus", criterion_6d),
    ("7", "identity suites", criterion_7),
    ("8", "discrete-to-continuum convergence", criterion_8),
    ("9", "determinism", criterion_9),
]


def format_line(cid: str, title: str, outcome: Outcome) -> str:
    return f"{'PASS' if outcome.passed else 'FAIL'}  criterion {cid:<3} {title}: {outcome.detail}"


@pytest.mark.parametrize("cid,title,check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(cid, title, check, record_property):
    with mpmath.workprec(PRECISION):
        outcome = check()
    line = format_line(cid, title, outcome)
    record_property("acceptance", line)
    print(line)
    assert outcome.passed, line


if __name__ == "__main__":
    failed = 0
    with mpmath.workprec(PRECISION):
        for cid, title, check in CRITERIA:
            outcome = check()
            failed += not outcome.passed
            print(format_line(cid, title, outcome), flush=True)
    sys.exit(1 if failed else 0)

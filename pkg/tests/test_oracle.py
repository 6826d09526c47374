import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerlab.errors import DimensionTooLarge, EnumerationCapExceeded, MalformedSuperposition
from dimerlab.oracle import (
    DoubleDimerConfig,
    GridSpec,
    classify,
    count_matchings,
    enumerate_matchings,
    exhaustive_hookup,
    iter_matchings,
    serialize_matching,
)


def kasteleyn_count(M, N):
    """Temperley-Fisher product, evaluated in floating point and rounded."""
    if (M * N) % 2:
        return 0
    log_total = 0.0
    for j in range(1, M + 1):
        for k in range(1, N + 1):
            log_total += 0.25 * math.log(
                4 * math.cos(math.pi * j / (M + 1)) ** 2 + 4 * math.cos(math.pi * k / (N + 1)) ** 2
            )
    return round(math.exp(log_total))


@pytest.mark.parametrize(
    "M,N,expected",
    [(2, 1, 1), (1, 1, 0), (2, 2, 2), (2, 3, 3), (3, 4, 11), (4, 4, 36), (6, 6, 6728), (8, 8, 12988816)],
)
def test_known_counts(M, N, expected):
    assert count_matchings(GridSpec(M, N)) == expected


def test_strip_counts_are_fibonacci():
    fib = [1, 1]
    for _ in range(30):
        fib.append(fib[-1] + fib[-2])
    for n in range(1, 25):
        assert count_matchings((2, n)) == fib[n]


@pytest.mark.parametrize("M", range(1, 9))
@pytest.mark.parametrize("N", range(1, 9))
def test_dp_matches_kasteleyn_product(M, N):
    assert count_matchings((M, N)) == kasteleyn_count(M, N)


def test_corner_monomers_small():
    assert count_matchings((2, 3), [(1, 1), (2, 1)]) == 2
    assert count_matchings((2, 3), [(1, 1), (2, 3)]) == 1
    # two sites of the same colour can never be removed from a bipartite cover
    assert count_matchings((2, 3), [(1, 1), (2, 2)]) == 0


def test_odd_site_count_vanishes():
    assert count_matchings((3, 5)) == 0
    assert count_matchings((2, 3), [(1, 1)]) == 0


def test_profile_width_cap():
    with pytest.raises(DimensionTooLarge):
        count_matchings((30, 30))


def test_monomer_validation():
    with pytest.raises(ValueError):
        count_matchings((2, 3), [(3, 1), (1, 1)])
    with pytest.raises(ValueError):
        count_matchings((2, 3), [(1, 1), (1, 1)])
    with pytest.raises(ValueError):
        GridSpec(0, 3)


@given(st.integers(1, 7), st.integers(1, 7))
@settings(max_examples=40, deadline=None)
def test_transpose_symmetry(M, N):
    assert count_matchings((M, N)) == count_matchings((N, M))


@given(st.integers(1, 5), st.integers(1, 5))
@settings(max_examples=30, deadline=None)
def test_enumeration_agrees_with_dp(M, N):
    matchings = enumerate_matchings((M, N))
    assert len(matchings) == count_matchings((M, N))
    assert len(set(matchings)) == len(matchings)
    assert matchings == sorted(matchings)


def test_enumerated_matchings_are_perfect():
    grid = GridSpec(4, 3)
    for mt in iter_matchings(grid, [(1, 1), (4, 1)]):
        covered = [s for e in mt for s in e]
        assert len(covered) == len(set(covered)) == 10
        for (a, b), (c, d) in mt:
            assert abs(a - c) + abs(b - d) == 1


def test_enumeration_cap():
    with pytest.raises(EnumerationCapExceeded):
        enumerate_matchings((8, 8))
    with pytest.raises(EnumerationCapExceeded):
        enumerate_matchings((4, 4), cap=10)


def test_serialization_is_sorted_pairs():
    mt = enumerate_matchings((2, 2))[0]
    out = serialize_matching(mt)
    assert out == sorted(out)
    assert all(len(e) == 2 and len(e[0]) == 2 for e in out)


def _pick(grid, monomers, index=0):
    return enumerate_matchings(grid, monomers)[index]


def test_classify_single_superposition():
    grid = GridSpec(2, 3)
    bl, br, tl, tr = grid.corners
    a = _pick(grid, (bl, br))
    b = _pick(grid, (tl, tr))
    c = classify(DoubleDimerConfig(grid, a, b, (bl, br), (tl, tr)))
    assert c.type in ("I", "II")
    assert c.loops == 0


def test_classify_rejects_bad_matching():
    grid = GridSpec(2, 3)
    bl, br, tl, tr = grid.corners
    a = _pick(grid, (bl, br))
    with pytest.raises((MalformedSuperposition, ValueError)):
        classify(DoubleDimerConfig(grid, a[:-1], a, (bl, br), (tl, tr)))


# (M, N) -> (n_total, n_typeI, P); n_total and n_typeI are squares of corner-monomer counts
HOOKUP_TABLE = {
    (2, 3): (4, 1, Fraction(3, 5)),
    # bottom corners removed leaves a 2x4 strip: 5 covers
    (2, 5): (25, 1, Fraction(12, 13)),
    (4, 3): (None, None, Fraction(11, 61)),
    (4, 5): (None, None, Fraction(1235, 2293)),
}


@pytest.mark.parametrize("shape", sorted(HOOKUP_TABLE))
def test_exhaustive_hookup_small(shape):
    M, N = shape
    rep = exhaustive_hookup(shape)
    n_total, n_I, P = HOOKUP_TABLE[shape]
    q11 = count_matchings(shape, [(1, 1), (M, 1)])
    q1N = count_matchings(shape, [(1, 1), (M, N)])
    assert rep.n_total == q11**2
    assert rep.n_typeI == q1N**2
    if n_total is not None:
        assert rep.n_total == n_total
    if n_I is not None:
        assert rep.n_typeI == n_I
    assert rep.P == P
    assert rep.n_typeI + rep.n_typeII == rep.n_total
    assert rep.Z - rep.Z_I == Fraction(rep.n_typeII, rep.q0**2)
    assert sum(rep.loop_histogram.values()) == rep.n_total


def test_hookup_report_dict_is_stringly():
    d = exhaustive_hookup((2, 3)).as_dict()
    assert d["P"] == "3/5"
    assert d["Z"] == "4/9"
    assert d["Z_I"] == "1/9"


def test_hookup_needs_even_by_odd():
    with pytest.raises(ValueError):
        exhaustive_hookup((3, 3))
    with pytest.raises(ValueError):
        exhaustive_hookup((2, 4))

"""Multi-index order, enumeration, and arithmetic."""

import itertools
from math import comb

import pytest

from germradius import DimensionMismatch, compare, count_upto, enumerate_upto
from germradius.mindex import add, grlex_key, mi_factorial, scale, sub


def test_compare_degree_first_then_lex():
    assert compare((0, 1), (1, 0)) == -1
    assert compare((2, 0), (0, 1)) == 1
    assert compare((1, 2, 0), (1, 2, 0)) == 0


def test_compare_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compare((1, 0), (1, 0, 0))


def test_enumerate_upto_small_cases():
    assert enumerate_upto(1, 2) == [(0,), (1,), (2,)]
    assert enumerate_upto(2, 1) == [(0, 0), (0, 1), (1, 0)]
    two_two = enumerate_upto(2, 2)
    assert len(two_two) == comb(4, 2) == 6
    assert two_two[-1] == (2, 0)


@pytest.mark.parametrize("n,d", [(1, 6), (2, 4), (3, 4), (4, 3)])
def test_enumerate_upto_count_and_strict_increase(n, d):
    seq = enumerate_upto(n, d)
    # count oracle: exhaustive generation over the cube, filtered by degree
    brute = [g for g in itertools.product(range(d + 1), repeat=n) if sum(g) <= d]
    assert len(seq) == len(brute) == count_upto(n, d)
    assert set(seq) == set(brute)
    assert seq[0] == (0,) * n
    for a, b in zip(seq, seq[1:]):
        assert compare(a, b) == -1


def test_total_order_properties():
    for n in (1, 2, 3):
        seq = enumerate_upto(n, 3)
        for a in seq:
            for b in seq:
                cab = compare(a, b)
                assert cab == -compare(b, a)
                assert (cab == 0) == (a == b)
        # transitivity on a subsample
        for a, b, c in itertools.product(seq[: 12], repeat=3):
            if compare(a, b) <= 0 and compare(b, c) <= 0:
                assert compare(a, c) <= 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_additivity(n):
    # if g >= a and h >= b then g+h >= a+b, equality only at equality:
    # exhaustive over all index pairs up to degree 4
    seq = enumerate_upto(n, 4)
    ge_pairs = [(g, a) for g in seq for a in seq if compare(g, a) >= 0]
    for g, a in ge_pairs:
        for h, b in ge_pairs:
            smaller = add(a, b)
            larger = add(g, h)
            c = compare(larger, smaller)
            assert c >= 0
            if c == 0:
                assert g == a and h == b


def test_mi_factorial():
    assert mi_factorial((0, 0)) == 1
    assert mi_factorial((2, 1)) == 2
    assert mi_factorial((3, 3)) == 36


def test_scale_add_sub():
    assert scale((1, 0), 3) == (3, 0)
    assert add((2, 1), (0, 2)) == (2, 3)
    assert sub((2, 1), (1, 1)) == (1, 0)
    assert sub((0, 1), (1, 0)) is None
    with pytest.raises(DimensionMismatch):
        add((1,), (1, 0))


def test_grlex_key_orders_like_compare():
    seq = enumerate_upto(3, 3)
    assert sorted(seq, key=grlex_key) == seq

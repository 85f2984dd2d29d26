import bisect
import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smoothcount import (
    DivisorExceedsX,
    DomainError,
    XValue,
    count_smooth,
    count_squares_exact,
    floor_log,
    generate_smooth,
    is_member,
)


def test_floor_log_examples():
    assert floor_log(2, 1000) == 9
    assert floor_log(3, 1) == 0
    assert floor_log(3, XValue.parse("1e100")) == 209
    assert 3**209 <= 10**100 < 3**210


def test_floor_log_divisor():
    assert floor_log(2, 1000, 3) == 8
    with pytest.raises(DivisorExceedsX):
        floor_log(2, 10, 11)
    with pytest.raises(DomainError):
        floor_log(1, 10)


@given(st.integers(2, 1000), st.integers(1, 10**200), st.integers(1, 10**5))
def test_floor_log_bracket(a, x, d):
    if d > x:
        return
    e = floor_log(a, x, d)
    assert a**e * d <= x < a ** (e + 1) * d


def test_floor_log_borderline_powers():
    for a in (3, 7, 10, 1000):
        for e in (1, 50, 333, 1001):
            assert floor_log(a, a**e) == e
            assert floor_log(a, a**e - 1) == e - 1


def test_count_examples():
    assert count_smooth((2, 3), XValue.parse("1e2")) == 20
    assert count_smooth((2, 3, 5), XValue.parse("1e3")) == 86
    assert count_smooth((2, 3), 1) == 1
    assert count_smooth((2,), 8) == 4


def test_generate_examples():
    assert list(generate_smooth((2, 3), 27)) == [1, 2, 3, 4, 6, 8, 9, 12, 16, 18, 24, 27]
    assert list(generate_smooth((2, 3, 5), 10)) == [1, 2, 3, 4, 5, 6, 8, 9, 10]
    assert list(generate_smooth((2,), 16)) == [1, 2, 4, 8, 16]


def test_generate_handles_non_coprime_duplicates():
    out = list(generate_smooth((6, 10, 15), 10**4))
    assert out == sorted(set(out))
    assert len(out) == count_smooth((6, 10, 15), 10**4) - _dupes((6, 10, 15), 10**4)


def _dupes(basis, x):
    # exponent tuples minus distinct values, by brute force
    tuples = 0
    vals = set()
    ranges = [range(0, 40)] * len(basis)
    for exps in itertools.product(*ranges):
        v = 1
        for a, e in zip(basis, exps):
            v *= a**e
        if v <= x:
            tuples += 1
            vals.add(v)
    return tuples - len(vals)


@pytest.mark.parametrize("basis", [(2, 3), (2, 3, 5), (2, 3, 5, 7)])
def test_generate_matches_count_up_to_1e6(basis):
    members = list(generate_smooth(basis, 10**6))
    assert members == sorted(set(members))
    assert len(members) == count_smooth(basis, 10**6)
    rng = random.Random(len(basis))
    for x in [1, 2, 10**6] + [rng.randint(1, 10**6) for _ in range(300)]:
        assert count_smooth(basis, x) == bisect.bisect_right(members, x)


def test_count_differences_are_membership():
    for basis in [(2, 3), (2, 3, 5)]:
        prev = count_smooth(basis, 1)
        for x in range(2, 10**4 + 1):
            cur = count_smooth(basis, x)
            assert cur - prev == (1 if is_member(x, basis) else 0)
            prev = cur


@given(st.permutations([2, 3, 5, 7]), st.integers(1, 10**12))
def test_count_invariant_under_order(perm, x):
    assert count_smooth(perm, x) == count_smooth((2, 3, 5, 7), x)


@given(st.integers(1, 10**15), st.integers(0, 10**15))
def test_count_monotone(x, dx):
    assert count_smooth((2, 3, 5), x) <= count_smooth((2, 3, 5), x + dx)


def test_large_rows_run_exactly():
    assert count_smooth((2, 3), XValue.parse("1e1000")) == 3483931
    assert count_smooth((2, 3, 5), XValue.parse("1e100")) == 1697191


def brute_squares(a, b, x):
    out = 0
    for p in range(0, 40):
        if a ** (p * p) > x:
            break
        for q in range(0, 40):
            if a ** (p * p) * b ** (q * q) > x:
                break
            out += 1
    return out


def test_count_squares_examples():
    assert count_squares_exact(2, 3, XValue.parse("1e2")) == 7
    assert count_squares_exact(2, 3, 1) == 1
    assert count_squares_exact(2, 3, XValue.parse("1e4")) == 11


@given(st.sampled_from([(2, 3), (2, 5), (3, 4), (5, 7)]), st.integers(1, 10**30))
def test_count_squares_brute_force(ab, x):
    a, b = ab
    assert count_squares_exact(a, b, x) == brute_squares(a, b, x)


def test_count_squares_domain():
    with pytest.raises(DomainError):
        count_squares_exact(2, 4, 10)
    with pytest.raises(DomainError):
        count_squares_exact(3, 2, 10)


def test_generated_are_members_and_gaps_are_not():
    basis = (2, 3, 5)
    members = list(generate_smooth(basis, 10**8))
    assert all(is_member(g, basis) for g in members)
    rng = random.Random(9)
    gaps = [(a, b) for a, b in zip(members, members[1:]) if b - a > 1]
    for a, b in rng.sample(gaps, 1000):
        assert not is_member(rng.randint(a + 1, b - 1), basis)

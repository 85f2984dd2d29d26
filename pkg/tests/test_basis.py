import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smoothcount import BasisError, XValue, is_member, is_member_squares, validate_basis
from smoothcount.basis import factorize


def kinds(exc):
    return [(v.kind, v.indices) for v in exc.value.violations]


def test_valid_basis():
    b = validate_basis((2, 3))
    assert b.elements == (2, 3)
    assert b.exponent_vectors == ((1, 0), (0, 1))


def test_dependent_pair():
    with pytest.raises(BasisError) as exc:
        validate_basis((2, 4))
    assert ("MultiplicativelyDependentPair", (0, 1)) in kinds(exc)


def test_dependent_pair_despite_gcd_one():
    with pytest.raises(BasisError) as exc:
        validate_basis((2, 3, 4))
    assert kinds(exc) == [("MultiplicativelyDependentPair", (0, 2))]


def test_every_violation_is_listed():
    with pytest.raises(BasisError) as exc:
        validate_basis((0, 4, 4, 8), sort=False)
    found = {k for k, _ in kinds(exc)}
    assert {"ElementBelowTwo", "NotAscending", "GcdNotOne"} <= found


def test_unsorted_input_rejected_without_sort():
    with pytest.raises(BasisError) as exc:
        validate_basis((3, 2), sort=False)
    assert kinds(exc) == [("NotAscending", (0, 1))]
    assert validate_basis((3, 2)).elements == (2, 3)


def test_relaxed_validation():
    assert validate_basis((2, 3, 4), strict=False).elements == (2, 3, 4)
    with pytest.raises(BasisError) as exc:
        validate_basis((2, 4), strict=False)
    assert kinds(exc) == [("GcdNotOne", ())]
    assert validate_basis((4, 6), strict=False, check_gcd=False).elements == (4, 6)


def test_independence_beyond_primes():
    # 6 = 2*3 and 12 = 2^2*3 are not parallel; 8 and 32 are (both powers of 2)
    validate_basis((6, 12, 5))
    with pytest.raises(BasisError):
        validate_basis((8, 32, 3))


@given(st.integers(2, 10**6))
def test_factorize_roundtrip(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        prod *= p**e
    assert prod == n


# -- XValue -------------------------------------------------------------------


def test_xvalue_forms_compare_equal():
    assert XValue.power_of_ten(3) == XValue(1000)
    assert XValue.parse("1e100") == XValue(10**100)
    assert XValue.parse("1000000") == XValue.power_of_ten(6)
    assert hash(XValue.parse("1e6")) == hash(XValue(10**6))
    assert XValue.parse("1e2") < XValue(101)


@pytest.mark.parametrize("bad", ["", "abc", "1.5", "-3", "1e-2", "2e3"])
def test_xvalue_parse_errors(bad):
    with pytest.raises(ValueError):
        XValue.parse(bad)


def test_xvalue_rejects_below_one():
    with pytest.raises(ValueError):
        XValue(0)


# -- membership ---------------------------------------------------------------


def test_member_examples():
    assert is_member(6, (2, 3))
    assert not is_member(7, (2, 3))
    assert is_member(360, (6, 10))
    assert is_member(1, (2, 3))
    assert is_member(XValue.parse("1e100"), (2, 5))
    assert not is_member(XValue.parse("1e100"), (2, 3))


def test_member_squares_examples():
    listing = [1, 2, 3, 6, 16, 48, 81, 162]
    assert [n for n in range(1, 163) if is_member_squares(n, 2, 3)] == listing
    assert not is_member_squares(12, 2, 3)


def test_member_squares_brute_force():
    members = {2 ** (p * p) * 3 ** (q * q) for p in range(6) for q in range(5)}
    for n in range(1, 5000):
        assert is_member_squares(n, 2, 3) == (n in members)


def trial_division_member(n, primes):
    for p in primes:
        while n % p == 0:
            n //= p
    return n == 1


def test_member_prime_basis_vs_trial_division():
    rng = random.Random(5)
    for primes in [(2, 3), (2, 3, 5), (2, 3, 5, 7)]:
        for _ in range(1000):
            n = rng.randint(1, 10**6)
            assert is_member(n, primes) == trial_division_member(n, primes)


def test_member_non_coprime_basis_vs_enumeration():
    basis = (6, 10, 15)
    members = {6**i * 10**j * 15**k for i in range(8) for j in range(7) for k in range(6)}
    for n in range(1, 20000):
        assert is_member(n, basis) == (n in members)


@given(st.permutations([2, 3, 5, 7]), st.integers(1, 10**9))
def test_member_invariant_under_order(perm, n):
    assert is_member(n, perm) == is_member(n, (2, 3, 5, 7))


def test_nonintegers_are_never_members():
    from fractions import Fraction

    assert not is_member(XValue(Fraction(11, 10)), (2, 3))
    assert not is_member_squares(XValue(Fraction(11, 10)), 2, 3)


def test_basis_permutations_validate_identically():
    for perm in itertools.permutations((5, 2, 7, 3)):
        assert validate_basis(perm).elements == (2, 3, 5, 7)

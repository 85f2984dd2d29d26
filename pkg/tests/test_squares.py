import mpmath
import pytest

from smoothcount import DomainError, SquaresTruncation, XValue, count_squares_exact, n2_formula
from smoothcount.squares import _ordered_pairs, first_rounding_cap


def test_table_examples(ctx):
    a = n2_formula(2, 3, XValue.parse("1e4"), SquaresTruncation((5, 5), 400), ctx)
    assert abs(a.total - ctx.mpf("11.038613589829053")) < 1e-14
    b = n2_formula(2, 3, XValue.parse("1e2"), SquaresTruncation((5, 5), 400), ctx)
    assert abs(b.total - ctx.mpf("7.000949506610362")) < 1e-14


def test_large_row_rounds(ctx):
    rep = n2_formula(2, 3, XValue.parse("1e100"), SquaresTruncation((39, 39), 400), ctx)
    assert rep.rounded_count == 226


def test_transcription_oracle(ctx):
    """The whole formula written out with mpmath.besselj at higher precision."""
    x, N, K = 10**7, 9, 400
    with mpmath.workdps(40):
        L, la, lb = mpmath.log(x), mpmath.log(2), mpmath.log(3)
        ra, rb = mpmath.sqrt(L / la), mpmath.sqrt(L / lb)
        pi = mpmath.pi
        main = pi * L / (4 * mpmath.sqrt(la * lb)) + ra / 2 + rb / 2 + mpmath.mpf(1) / 4
        bern = -((ra - mpmath.floor(ra) - 0.5) + (rb - mpmath.floor(rb) - 0.5)) / 2
        dbl = 0
        for n in range(1, N + 1):
            for m in range(1, N + 1):
                q = n * n * la + m * m * lb
                dbl += mpmath.besselj(1, 2 * pi * mpmath.sqrt(q * L / (la * lb))) / mpmath.sqrt(q)
        dbl *= mpmath.sqrt(L)
        single = sum(ra / 2 * mpmath.besselj(1, 2 * pi * k * rb) / k + rb / 2 * mpmath.besselj(1, 2 * pi * k * ra) / k
                     for k in range(1, K + 1))
        ref = main + bern + dbl + single
    rep = n2_formula(2, 3, x, SquaresTruncation((N, N), K), ctx)
    assert abs(rep.total - ref) < 1e-30
    assert abs(rep.total - ctx.mpf("18.408421860888305")) < 1e-9
    assert rep.rounded_count == 18


def test_report_shape(ctx):
    rep = n2_formula(2, 3, 1000, SquaresTruncation((3, 3), 50), ctx)
    assert rep.variant == "squares"
    assert rep.terms_used == {2: 3, 3: 3, "k": 50}
    assert rep.truncation == "(n,m)=(3,3),K=50"
    parts = rep.main_term + rep.bernoulli_terms + rep.oscillatory + rep.chi_term
    assert abs(parts - rep.total) < ctx.tolerance * rep.total


def test_exact_power_takes_integer_branch(ctx):
    # x = 2**16 gives sqrt(log x / log 2) = 4 exactly; 2**16 is also a member
    rep = n2_formula(2, 3, 2**16, SquaresTruncation((5, 5), 400), ctx)
    assert rep.chi_term == ctx.mpf(0.5)
    assert rep.rounded_count == count_squares_exact(2, 3, 2**16)


def test_step_behaviour_around_members(ctx):
    # at a member the total already includes the new point, so "at" and
    # "above" agree only in the limit; the truncated series dips just past
    # the jump
    trunc = SquaresTruncation((20, 20), 400)
    for member in (48, 81, 162, 2**16):
        below = n2_formula(2, 3, member - 1, trunc, ctx).total
        at = n2_formula(2, 3, member, trunc, ctx).total
        above = n2_formula(2, 3, member + 1, trunc, ctx).total
        assert below < at and below < above
        assert abs(at - above) < 0.5


def test_pair_order():
    assert list(_ordered_pairs(2, 3)) == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (2, 3)]


def test_first_rounding_cap(ctx):
    cap = first_rounding_cap(2, 3, XValue.parse("1e4"), ctx=ctx)
    assert cap is not None and cap <= 5
    rep = n2_formula(2, 3, XValue.parse("1e4"), SquaresTruncation((cap, cap)), ctx)
    assert rep.rounded_count == 11


def test_domain(ctx):
    with pytest.raises(DomainError):
        n2_formula(2, 3, 1, None, ctx)
    with pytest.raises(DomainError):
        n2_formula(2, 4, 10, None, ctx)
    with pytest.raises(ValueError):
        SquaresTruncation((0, 1))

"""Counting numbers of the form a**(p*p) * b**(q*q) with a Bessel series."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import EvalReport
from .basis import as_xvalue, is_member_squares
from .errors import DomainError
from .exact import count_squares_exact
from .numerics import (
    DEFAULT_DIGITS,
    PrecisionContext,
    b1_star,
    bessel_j1,
    frac_log_ratio,
    hp_log,
    working_context,
)

__all__ = ["SquaresTruncation", "n2_formula", "first_rounding_cap"]

DEFAULT_K = 400


@dataclass(frozen=True)
class SquaresTruncation:
    nm_cap: tuple[int, int] = (5, 5)
    k_cap: int = DEFAULT_K

    def __post_init__(self):
        n, m = (int(c) for c in self.nm_cap)
        if n < 1 or m < 1 or int(self.k_cap) < 1:
            raise ValueError(f"caps must be >= 1, got nm={self.nm_cap}, k={self.k_cap}")
        object.__setattr__(self, "nm_cap", (n, m))
        object.__setattr__(self, "k_cap", int(self.k_cap))

    def describe(self) -> str:
        n, m = self.nm_cap
        return f"(n,m)=({n},{m}),K={self.k_cap}"


def _check(a: int, b: int, x):
    if not (2 <= a < b) or math.gcd(a, b) != 1:
        raise DomainError(f"need 2 <= a < b with gcd(a, b) = 1, got ({a}, {b})")
    x = as_xvalue(x)
    if x <= 1:
        raise DomainError(f"the Bessel series is stated for x > 1, got x = {x}")
    return x


def _sqrt_ratio(x, a, w):
    """sqrt(log x / log a), plus whether it is exactly an integer."""
    q, t = frac_log_ratio(x, a, w)
    exact = t == 0 and math.isqrt(q) ** 2 == q
    return w.mp.sqrt(q + t), exact


def _ordered_pairs(N: int, M: int):
    # increasing n + m, then increasing n
    for s in range(2, N + M + 1):
        for n in range(max(1, s - M), min(N, s - 1) + 1):
            yield n, s - n


def n2_formula(a: int, b: int, x, trunc: SquaresTruncation | None = None, ctx: PrecisionContext | None = None) -> EvalReport:
    """Bessel-series value of the count of ``a**(p*p) * b**(q*q) <= x``."""
    x = _check(a, b, x)
    trunc = trunc or SquaresTruncation()
    ctx = ctx or PrecisionContext(DEFAULT_DIGITS)
    w = working_context(ctx, x, a)
    mp = w.mp
    pi = w.pi
    L = x.log(w)
    la, lb = hp_log(a, w), hp_log(b, w)
    ra, exact_a = _sqrt_ratio(x, a, w)
    rb, exact_b = _sqrt_ratio(x, b, w)

    main = pi * L / (4 * mp.sqrt(la * lb)) + ra / 2 + rb / 2 + mp.mpf(1) / 4
    bern = -(b1_star(ra, exact_integer=exact_a or None) + b1_star(rb, exact_integer=exact_b or None)) / 2

    N, M = trunc.nm_cap
    scale = L / (la * lb)
    double = mp.zero
    for n, m in _ordered_pairs(N, M):
        q = n * n * la + m * m * lb
        double += bessel_j1(2 * pi * mp.sqrt(q * scale), w) / mp.sqrt(q)
    double *= mp.sqrt(L)

    single_a = mp.zero
    single_b = mp.zero
    for k in range(1, trunc.k_cap + 1):
        single_a += bessel_j1(2 * pi * k * rb, w) / k
        single_b += bessel_j1(2 * pi * k * ra, w) / k
    osc = double + ra / 2 * single_a + rb / 2 * single_b

    chi = mp.mpf(1) / 2 if is_member_squares(x, a, b) else mp.zero
    out = ctx.mp
    parts = [out.mpf(v) for v in (main, bern, osc, chi)]
    total = parts[0] + parts[1] + parts[2] + parts[3]
    return EvalReport(
        variant="squares",
        basis=(a, b),
        x=x,
        digits=ctx.digits,
        truncation=trunc.describe(),
        main_term=parts[0],
        bernoulli_terms=parts[1],
        oscillatory=parts[2],
        chi_term=parts[3],
        total=total,
        rounded_count=int(out.nint(total)),
        terms_used={a: N, b: M, "k": trunc.k_cap},
    )


def first_rounding_cap(a: int, b: int, x, k_cap: int = DEFAULT_K, max_cap: int = 64, ctx: PrecisionContext | None = None) -> int | None:
    """Smallest symmetric cap ``N = M`` whose total rounds to the exact count."""
    target = count_squares_exact(a, b, x)
    for cap in range(1, max_cap + 1):
        rep = n2_formula(a, b, x, SquaresTruncation((cap, cap), k_cap), ctx)
        if rep.rounded_count == target:
            return cap
    return None

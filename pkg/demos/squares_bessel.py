#!/usr/bin/env python
# Numbers 2**(p*p) * 3**(q*q): Bessel series against the exact count
from smoothcount import PrecisionContext, SquaresTruncation, count_squares_exact, n2_formula

ctx = PrecisionContext(30)
for e, cap in [(2, 5), (4, 5), (7, 9), (10, 9), (100, 39)]:
    x = 10**e
    rep = n2_formula(2, 3, x, SquaresTruncation((cap, cap), 400), ctx)
    print(f"1e{e:<4} exact={count_squares_exact(2, 3, x):<4} formula={float(rep.total):.12f}")

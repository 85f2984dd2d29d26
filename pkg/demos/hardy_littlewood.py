#!/usr/bin/env python
# N_{2,3}(10**6) = 142.  Watch the cosecant series settle as R grows.
from smoothcount import PrecisionContext, TruncationSpec, count_smooth, evaluate, sweep

ctx = PrecisionContext(40)
x = 10**6
print("exact", count_smooth((2, 3), x))

Rs = [5, 10, 20, 40, 60, 120, 480]
for R, rep in zip(Rs, sweep("hl2", (2, 3), x, Rs, ctx)):
    print(f"R={R:<4} total={float(rep.total):.12f}  error={float(rep.total) - 142:+.2e}")

rep = evaluate("hl2", (2, 3), x, TruncationSpec(60), ctx)
print("main", float(rep.main_term), "bernoulli", float(rep.bernoulli_terms), "oscillatory", float(rep.oscillatory))

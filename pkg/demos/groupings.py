#!/usr/bin/env python
# The same residues grouped two ways.  The totals differ by a multiple of the
# sawtooth truncation error, which only dies off like 1/R.
from smoothcount import FormulaVariant, PrecisionContext, TruncationSpec, evaluate, grouping_defect
from smoothcount.analytic import GROUPING_WEIGHT

ctx = PrecisionContext(50)
x = 123457
for R in (50, 500, 5000):
    t = TruncationSpec(R)
    a = evaluate("hl2", (2, 3), x, t, ctx).total
    b = evaluate("hl2_cot", (2, 3), x, t, ctx).total
    d = grouping_defect((2, 3), x, t, ctx)
    w = GROUPING_WEIGHT[FormulaVariant.HL2]
    print(f"R={R:<5} hl2-hl2_cot={float(a - b):+.3e}  w*D={float(ctx.mpf(w) * d):+.3e}")

"""Command-line front end.

stdout carries data only; diagnostics go to stderr.  Exit codes: 0 ok,
1 verification failure, 2 invalid basis, 3 parse error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .analytic import FormulaVariant, TruncationSpec, evaluate, sweep
from .basis import XValue, as_xvalue
from .errors import ArityMismatch, BasisError, DomainError, ResonantDenominator
from .exact import count_smooth, count_squares_exact, generate_smooth
from .numerics import DEFAULT_DIGITS, PrecisionContext, format_fixed, to_fraction
from .squares import DEFAULT_K, SquaresTruncation, n2_formula
from .tables import get_preset

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_BASIS = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4

ENV_DIGITS = "SMOOTHCOUNT_DIGITS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument parsing helpers ---------------------------------------------


def _bases(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.replace(" ", "").split(",") if p)
    except ValueError:
        raise UsageError(f"cannot parse basis list {text!r}; use e.g. 2,3,5") from None


def _xvalue(text: str) -> XValue:
    try:
        return XValue.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse number {text!r}") from None
    return value


def _pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"cannot parse caps {text!r}; use N or N,M") from None
    if len(vals) == 1:
        return vals[0], vals[0]
    if len(vals) == 2:
        return vals[0], vals[1]
    raise UsageError(f"cannot parse caps {text!r}; use N or N,M")


def _r_range(text: str) -> list[Fraction]:
    """``a:b`` or ``a:b:step``, inclusive; a single value is allowed."""
    parts = text.split(":")
    if len(parts) == 1:
        return [_fraction(parts[0])]
    if len(parts) not in (2, 3):
        raise UsageError(f"cannot parse R range {text!r}; use a:b or a:b:step")
    start, stop = _fraction(parts[0]), _fraction(parts[1])
    step = _fraction(parts[2]) if len(parts) == 3 else Fraction(1)
    if step <= 0 or start <= 0 or stop < start:
        raise UsageError(f"R range {text!r} must be positive and ascending")
    out = []
    r = start
    while r <= stop:
        out.append(r)
        r += step
    return out


def _row_range(text: str | None, n: int) -> range:
    if text is None:
        return range(n)
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"cannot parse row range {text!r}; use a..b") from None
    if lo < 0 or hi >= n or lo > hi:
        raise UsageError(f"row range {text!r} outside 0..{n - 1}")
    return range(lo, hi + 1)


def _digits(args) -> int:
    if args.digits is not None:
        value = args.digits
    else:
        env = os.environ.get(ENV_DIGITS)
        if env is None or env.strip() == "":
            value = DEFAULT_DIGITS
        else:
            try:
                value = int(env)
            except ValueError:
                raise UsageError(f"{ENV_DIGITS}={env!r} is not an integer") from None
    if value < 15:
        raise UsageError(f"digits must be >= 15, got {value}")
    return value


def _fmt_r(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else format_fixed(r, 6).rstrip("0")


# -- output ------------------------------------------------------------------


def _emit_records(records: list[dict], fmt: str, out, columns: list[str] | None = None):
    if fmt == "json":
        out.write(json.dumps(records, indent=2) + "\n")
        return
    columns = columns or (list(records[0]) if records else [])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_cell(rec.get(c, "")) for c in columns])
        out.write(buf.getvalue())
        return
    rows = [[_cell(rec.get(c, "")) for c in columns] for rec in records]
    widths = [max([len(c)] + [len(r[i]) for r in rows]) for i, c in enumerate(columns)]
    out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for r in rows:
        out.write("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() + "\n")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, dict):
        return " ".join(f"{k}:{val}" for k, val in v.items())
    if isinstance(v, list):
        return ";".join(map(str, v)) if v else ""
    return str(v)


def _emit_report(report: dict, fmt: str, out):
    if fmt == "json":
        out.write(json.dumps(report, indent=2) + "\n")
        return
    if fmt == "csv":
        _emit_records([report], "csv", out)
        return
    width = max(len(k) for k in report)
    for key, value in report.items():
        text = _cell(value)
        if key == "resonance_warnings" and not value:
            text = "none"
        out.write(f"{key.ljust(width)}  {text}\n")


# -- subcommands -------------------------------------------------------------


def cmd_exact(args) -> int:
    basis = _bases(args.bases)
    x = _xvalue(args.x)
    if args.squares:
        if len(basis) != 2:
            raise ArityMismatch("--squares takes exactly two bases")
        value = count_squares_exact(basis[0], basis[1], x)
    else:
        value = count_smooth(basis, x)
    if args.format == "json":
        args.out.write(json.dumps({"basis": list(basis), "x": str(x), "count": value}, indent=2) + "\n")
    elif args.format == "csv":
        _emit_records([{"basis": ",".join(map(str, basis)), "x": str(x), "count": value}], "csv", args.out)
    else:
        args.out.write(f"{value}\n")
    return EXIT_OK


def _formula_report(args, ctx):
    basis = _bases(args.bases)
    x = _xvalue(args.x)
    if args.variant == "squares":
        if len(basis) != 2:
            raise ArityMismatch("the squares formula takes exactly two bases")
        nm = _pair(args.nm) if args.nm else (5, 5)
        return n2_formula(basis[0], basis[1], x, SquaresTruncation(nm, args.k), ctx)
    variant = FormulaVariant.parse(args.variant)
    caps = _pair(args.nm) if args.nm else None
    R = args.R if args.R is not None else Fraction(10)
    try:
        trunc = TruncationSpec(R, caps, args.adaptive)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return evaluate(variant, basis, x, trunc, ctx)


def cmd_formula(args) -> int:
    ctx = PrecisionContext(_digits(args))
    report = _formula_report(args, ctx)
    for m, k, mag in report.resonance_warnings:
        print(f"warning: small denominator |sin| = {mag:.3e} in family {m} at k = {k}", file=sys.stderr)
    _emit_report(report.to_dict(args.places), args.format, args.out)
    return EXIT_OK


def _table_row_job(payload):
    preset_id, index, digits, tolerance = payload
    preset = get_preset(preset_id)
    row = preset.rows[index]
    ctx = PrecisionContext(digits)
    exact = preset.exact(row)
    report = preset.formula(row, ctx)
    places = len(row.printed.split(".")[1]) if "." in row.printed else 0
    printed = ctx.mpf(Fraction(row.printed))
    diff = abs(report.total - printed)
    round_ok = report.rounded_count == exact and exact == row.count
    digits_ok = diff <= ctx.mpf(tolerance)
    return {
        "row": index,
        "x": row.label,
        "truncation": report.truncation,
        "exact": exact,
        "paper_count": row.count,
        "formula": format_fixed(report.total, places),
        "paper_formula": row.printed,
        "abs_diff": f"{float(diff):.3e}",
        "round_ok": round_ok,
        "digits_ok": bool(digits_ok),
        "status": "ok" if (round_ok and digits_ok) else "FAIL",
    }


def cmd_table(args) -> int:
    try:
        preset = get_preset(args.preset)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    digits = _digits(args)
    tolerance = _fraction(args.tolerance)
    rows = _row_range(args.rows, len(preset.rows))
    jobs, skipped = [], {}
    for i in rows:
        row = preset.rows[i]
        if row.beyond_desk_scale and not args.force:
            skipped[i] = row
        else:
            jobs.append((preset.id, i, digits, tolerance))
    results = {}
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for payload, rec in zip(jobs, pool.map(_table_row_job, jobs)):
                results[payload[1]] = rec
    else:
        for payload in jobs:
            results[payload[1]] = _table_row_job(payload)
    records = []
    for i in rows:
        if i in skipped:
            row = skipped[i]
            records.append({
                "row": i, "x": row.label, "truncation": "", "exact": "", "paper_count": row.count,
                "formula": "", "paper_formula": row.printed, "abs_diff": "",
                "round_ok": "", "digits_ok": "", "status": "skipped: beyond-desk-scale",
            })
        else:
            records.append(results[i])
    _emit_records(records, args.format, args.out)
    failed = [r for r in records if r["status"] == "FAIL"]
    print(
        f"{preset.id}: {len(records) - len(failed) - len(skipped)} ok, {len(failed)} failed, "
        f"{len(skipped)} skipped (tolerance {float(tolerance):g})",
        file=sys.stderr,
    )
    for r in failed:
        reasons = []
        if not r["round_ok"]:
            reasons.append("rounding")
        if not r["digits_ok"]:
            reasons.append(f"digits off by {r['abs_diff']}")
        print(f"  row {r['row']} (x={r['x']}): {', '.join(reasons)}", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def _sweep_chunk(payload):
    variant, basis, x, rs, digits = payload
    ctx = PrecisionContext(digits)
    out = []
    for rep in sweep(variant, basis, XValue.parse(x) if isinstance(x, str) else x, rs, ctx):
        out.append(rep)
    return [(r, to_fraction(rep.total), rep.rounded_count) for r, rep in zip(rs, out)]


def cmd_sweep(args) -> int:
    basis = _bases(args.bases)
    x = _xvalue(args.x)
    variant = FormulaVariant.parse(args.variant)
    rs = _r_range(args.R)
    digits = _digits(args)
    ctx = PrecisionContext(digits)
    exact = count_smooth(basis, x)
    n = max(1, min(args.jobs, len(rs)))
    size = -(-len(rs) // n)
    chunks = [rs[i:i + size] for i in range(0, len(rs), size)]
    payloads = [(variant, basis, x, c, digits) for c in chunks]
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(_sweep_chunk, payloads))
    else:
        parts = [_sweep_chunk(p) for p in payloads]
    records = []
    for part in parts:
        for r, total, rounded in part:
            total = ctx.mpf(total)
            places = args.places if args.places is not None else max(1, digits - 2 - len(str(exact)))
            records.append({
                "R": _fmt_r(r),
                "total": format_fixed(total, places),
                "exact": exact,
                "error": format_fixed(total - exact, places),
                "rounded_count": rounded,
            })
    _emit_records(records, args.format, args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    basis = _bases(args.bases)
    limit = _xvalue(args.limit)
    values = []
    for v in generate_smooth(basis, limit):
        if args.count is not None and len(values) >= args.count:
            break
        values.append(v)
    if args.format == "json":
        args.out.write(json.dumps([str(v) for v in values], indent=2) + "\n")
    elif args.format == "csv":
        args.out.write("value\n" + "".join(f"{v}\n" for v in values))
    else:
        args.out.write("".join(f"{v}\n" for v in values))
    return EXIT_OK


# -- wiring ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--digits", type=int, default=None,
                        help=f"working precision (env {ENV_DIGITS}, default {DEFAULT_DIGITS})")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for table and sweep")

    parser = _Parser(prog="smoothcount", description="Exact and analytic counts of multiplicative semigroups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", parents=[common], help="exact count by integer arithmetic")
    p.add_argument("--bases", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--squares", action="store_true", help="count a^(p^2) b^(q^2) instead")
    p.set_defaults(func=cmd_exact)

    variants = [v.value for v in FormulaVariant] + ["general", "squares"]
    p = sub.add_parser("formula", parents=[common], help="evaluate one analytic formula")
    p.add_argument("--variant", required=True, choices=variants)
    p.add_argument("--bases", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--R", type=_fraction, default=None, help="shared truncation parameter")
    p.add_argument("--nm", default=None, help="double-sum caps N or N,M")
    p.add_argument("--k", type=int, default=DEFAULT_K, help="single Bessel sum cap")
    p.add_argument("--adaptive", action="store_true")
    p.add_argument("--places", type=int, default=None, help="decimal places in output")
    p.set_defaults(func=cmd_formula)

    p = sub.add_parser("table", parents=[common], help="recompute a published table")
    p.add_argument("--preset", required=True)
    p.add_argument("--rows", default=None, help="inclusive row range a..b (0-based)")
    p.add_argument("--tolerance", default="1e-6")
    p.add_argument("--force", action="store_true", help="also run rows beyond desk scale")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", parents=[common], help="totals over a range of R")
    p.add_argument("--variant", required=True, choices=[v.value for v in FormulaVariant] + ["general"])
    p.add_argument("--bases", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--R", required=True, help="a:b or a:b:step")
    p.add_argument("--places", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("generate", parents=[common], help="list semigroup members in order")
    p.add_argument("--bases", required=True)
    p.add_argument("--limit", required=True)
    p.add_argument("--count", type=int, default=None)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        args.out = out
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (BasisError, ArityMismatch) as exc:
        print(f"invalid basis: {exc}", file=sys.stderr)
        return EXIT_BASIS
    except ResonantDenominator as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ArithmeticError, OverflowError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

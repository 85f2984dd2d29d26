"""Analytic counting formulas.

Every formula splits into four pieces:

    total = main + bernoulli + oscillatory + chi

``main`` is the residue at ``s = 0`` of ``x**s / (s * prod(1 - a_k**-s))``, a
polynomial in ``log x``.  The oscillatory part comes from the poles on the
imaginary axis, one family per basis element, and is truncated with a single
shared ``R``: family ``m`` keeps ``k <= floor(R * log a_m)``.  ``chi`` is
``1/2`` exactly when ``x`` lies in the semigroup, which makes the total equal
the count itself at its jump points.

Variants differ only in how the oscillatory terms are grouped; the grouping
decides the matching Bernoulli coefficient.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable

import gmpy2

from .basis import Basis, XValue, as_basis, as_xvalue, is_member
from .errors import ArityMismatch, DomainError, ResonantDenominator
from .numerics import (
    DEFAULT_DIGITS,
    PrecisionContext,
    b1_star,
    b2_frac,
    frac_log_ratio,
    hp_log,
    working_context,
)

__all__ = [
    "FormulaVariant",
    "TruncationSpec",
    "EvalReport",
    "LaurentSeries",
    "bernoulli_plus",
    "residue_main_term",
    "explicit_main_term",
    "oscillatory_general",
    "thm1_double_sum",
    "evaluate",
    "sweep",
    "grouping_defect",
    "GROUPING_WEIGHT",
]

ADAPTIVE_TOLERANCE = Fraction(1, 10**6)
ADAPTIVE_MAX_R = 10**6
ADAPTIVE_MAX_CAP = 4096


class FormulaVariant(enum.Enum):
    SINGLE = "single"
    SCHUMACHER2 = "schumacher2"
    HL2 = "hl2"
    HL2_COT = "hl2_cot"
    TRIPLE = "triple"
    TRIPLE_COT = "triple_cot"
    QUAD = "quad"
    QUAD_COT = "quad_cot"
    GENERAL_COT = "general_cot"

    @property
    def arity(self) -> int | None:
        """Required basis size, or None when any size works."""
        return _ARITY[self]

    @classmethod
    def parse(cls, value) -> "FormulaVariant":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        if key == "general":
            key = "general_cot"
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {value!r}; choose one of {names}") from None


_ARITY = {
    FormulaVariant.SINGLE: 1,
    FormulaVariant.SCHUMACHER2: 2,
    FormulaVariant.HL2: 2,
    FormulaVariant.HL2_COT: 2,
    FormulaVariant.TRIPLE: 3,
    FormulaVariant.TRIPLE_COT: 3,
    FormulaVariant.QUAD: 4,
    FormulaVariant.QUAD_COT: 4,
    FormulaVariant.GENERAL_COT: None,
}

# coefficient c in "- c * sum_k B1*({log x / log a_k})"
_B1_WEIGHT = {
    FormulaVariant.SINGLE: Fraction(1),
    FormulaVariant.SCHUMACHER2: Fraction(1, 2),
    FormulaVariant.HL2: Fraction(1),
    FormulaVariant.HL2_COT: Fraction(1, 2),
    FormulaVariant.TRIPLE: Fraction(1),
    FormulaVariant.TRIPLE_COT: Fraction(1, 4),
    FormulaVariant.QUAD: Fraction(7, 8),
    FormulaVariant.QUAD_COT: Fraction(1, 8),
}

_EXPLICIT_MAIN = {
    FormulaVariant.SCHUMACHER2,
    FormulaVariant.HL2,
    FormulaVariant.TRIPLE,
    FormulaVariant.QUAD,
}


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a number here")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"R must be finite, got {value}")
        return Fraction(value)
    raise TypeError(f"unsupported truncation value {value!r}")


@dataclass(frozen=True)
class TruncationSpec:
    """Truncation budget.

    ``R`` caps family ``m`` at ``floor(R * log a_m)`` terms.  The double series
    of the two-element Schumacher-type variant uses ``double_sum_caps`` instead
    and falls back to ``(floor(R), floor(R))``.  With ``adaptive`` set, the
    budget doubles until two totals differ by less than ``tolerance``.
    """

    R: Fraction | int | float | str = 10
    double_sum_caps: tuple[int, int] | None = None
    adaptive: bool = False
    tolerance: Fraction | float | str = ADAPTIVE_TOLERANCE
    max_R: int = ADAPTIVE_MAX_R

    def __post_init__(self):
        r = _as_fraction(self.R)
        if r <= 0:
            raise ValueError(f"R must be positive, got {self.R}")
        object.__setattr__(self, "R", r)
        object.__setattr__(self, "tolerance", _as_fraction(self.tolerance))
        if self.double_sum_caps is not None:
            n, m = (int(c) for c in self.double_sum_caps)
            if n < 1 or m < 1:
                raise ValueError(f"double-sum caps must be >= 1, got {self.double_sum_caps}")
            object.__setattr__(self, "double_sum_caps", (n, m))

    @property
    def caps(self) -> tuple[int, int]:
        if self.double_sum_caps is not None:
            return self.double_sum_caps
        r = max(1, math.floor(self.R))
        return (r, r)

    def family_cap(self, log_a, mp) -> int:
        return int(mp.floor(mp.mpf(self.R.numerator) / self.R.denominator * log_a))

    def describe(self, variant: "FormulaVariant") -> str:
        if variant is FormulaVariant.SCHUMACHER2:
            n, m = self.caps
            return f"(n,m)=({n},{m})"
        if variant is FormulaVariant.SINGLE:
            return "none"
        return f"R={_fmt_fraction(self.R)}"


def _fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else str(float(f))


@dataclass
class EvalReport:
    """Decomposed value of one formula at one point.

    The numeric fields are mpmath numbers at the caller's precision;
    ``total`` is their sum.
    """

    variant: FormulaVariant | str
    basis: tuple[int, ...]
    x: XValue
    digits: int
    truncation: str
    main_term: object
    bernoulli_terms: object
    oscillatory: object
    chi_term: object
    total: object
    rounded_count: int
    terms_used: dict[int, int] = field(default_factory=dict)
    resonance_warnings: list[tuple[int, int, float]] = field(default_factory=list)

    def to_dict(self, places: int | None = None) -> dict:
        from .numerics import format_fixed

        def fmt(v):
            return format_fixed(v, self.default_places(v) if places is None else places)

        return {
            "variant": getattr(self.variant, "value", self.variant),
            "basis": list(self.basis),
            "x": str(self.x),
            "digits": self.digits,
            "truncation": self.truncation,
            "main_term": fmt(self.main_term),
            "bernoulli_terms": fmt(self.bernoulli_terms),
            "oscillatory": fmt(self.oscillatory),
            "chi_term": fmt(self.chi_term),
            "total": fmt(self.total),
            "rounded_count": self.rounded_count,
            "terms_used": {str(a): k for a, k in self.terms_used.items()},
            "resonance_warnings": [
                {"family": m, "k": k, "abs_sin": f"{mag:.3e}"} for m, k, mag in self.resonance_warnings
            ],
        }

    def default_places(self, value=None) -> int:
        """Fraction digits that are still trustworthy for ``total``."""
        mag = abs(int(self.total)) if self.total is not None else 0
        return max(1, self.digits - 2 - len(str(mag)))


# --------------------------------------------------------------------------
# residue engine


def _bernoulli_numbers(count: int) -> list[Fraction]:
    """B_0 .. B_{count-1} with the convention B_1 = +1/2."""
    b = [Fraction(1)]
    for m in range(1, count):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * b[k]
        b.append(-acc / (m + 1))
    if count > 1:
        b[1] = Fraction(1, 2)
    return b


def bernoulli_plus(degree: int) -> list[Fraction]:
    """Taylor coefficients of ``z / (1 - exp(-z))`` through ``z**degree``."""
    bs = _bernoulli_numbers(degree + 1)
    return [bj / math.factorial(j) for j, bj in enumerate(bs)]


class LaurentSeries:
    """``s**(-order) * sum_j c_j s**j``, truncated after ``c_degree``.

    Products keep the shorter truncation, so every stored coefficient of a
    product is exact.
    """

    __slots__ = ("coefficients", "order")

    def __init__(self, coefficients: Iterable, order: int = 0):
        self.coefficients = list(coefficients)
        self.order = int(order)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        d = min(self.degree, other.degree)
        a, b = self.coefficients, other.coefficients
        out = []
        for j in range(d + 1):
            acc = a[0] * b[j]
            for i in range(1, j + 1):
                acc += a[i] * b[j - i]
            out.append(acc)
        return LaurentSeries(out, self.order + other.order)

    def coefficient(self, power: int):
        """Coefficient of ``s**power``."""
        j = power + self.order
        if j < 0:
            return 0 * self.coefficients[0]
        if j > self.degree:
            raise IndexError(f"s**{power} lies beyond the truncation")
        return self.coefficients[j]

    def residue(self):
        return self.coefficient(-1)

    @classmethod
    def exp(cls, L, degree: int) -> "LaurentSeries":
        """``exp(L s)``."""
        coeffs = [L * 0 + 1]
        for j in range(1, degree + 1):
            coeffs.append(coeffs[-1] * L / j)
        return cls(coeffs)

    @classmethod
    def geometric_pole(cls, t, degree: int) -> "LaurentSeries":
        """``1 / (1 - exp(-t s))`` as ``s**-1 * g(t s) / t``."""
        beta = bernoulli_plus(degree)
        coeffs = []
        tp = t / t  # 1 in the type of t
        for bj in beta:
            coeffs.append(tp * bj.numerator / bj.denominator / t)
            tp = tp * t
        return cls(coeffs, order=1)

    def __repr__(self) -> str:
        return f"LaurentSeries(order={self.order}, coefficients={self.coefficients!r})"


def _residue_from_logs(logs, L, mp):
    n = len(logs)
    series = LaurentSeries.exp(L, n) * LaurentSeries([mp.one] + [mp.zero] * n, order=1)
    for t in logs:
        series = series * LaurentSeries.geometric_pole(t, n)
    return series.residue()


def residue_main_term(basis, x, ctx: PrecisionContext | None = None):
    """Residue at zero of ``x**s / (s * prod(1 - a_k**-s))``."""
    ctx = ctx or PrecisionContext()
    basis = as_basis(basis)
    x = as_xvalue(x)
    w = working_context(ctx, x, basis[0])
    logs = [hp_log(a, w) for a in basis.elements]
    return ctx.mp.mpf(_residue_from_logs(logs, x.log(w), w.mp))


def _main_two(l, L):
    la, lb = l
    return (L + la) * (L + lb) / (2 * la * lb) + la / (12 * lb) + lb / (12 * la) - 0.25


def _main_three(l, L):
    prod = l[0] * l[1] * l[2]
    total = L**3 / (6 * prod)
    for i, j in combinations(range(3), 2):
        total += L**2 / (4 * l[i] * l[j])
    for i in range(3):
        total += L / (4 * l[i])
    for i in range(3):
        j, k = (p for p in range(3) if p != i)
        total += l[i] * L / (12 * l[j] * l[k])
    for i in range(3):
        for j in range(3):
            if i != j:
                total += l[i] / (24 * l[j])
    return total + 0.125


def _main_four(l, L):
    idx = range(4)
    prod = l[0] * l[1] * l[2] * l[3]
    total = L**4 / (24 * prod)
    for i, j, k in combinations(idx, 3):
        total += L**3 / (12 * l[i] * l[j] * l[k])
    for i in idx:
        total += l[i] * L**2 / (24 * prod / l[i])
    for i, j in combinations(idx, 2):
        total += L**2 / (8 * l[i] * l[j])
    for i in idx:
        total += L / (8 * l[i])
    for i in idx:
        for j, k in combinations([p for p in idx if p != i], 2):
            total += l[i] * L / (24 * l[j] * l[k])
    total += 0.0625
    for i in idx:
        for j in idx:
            if i != j:
                total += l[i] / (48 * l[j])
    for i, j in combinations(idx, 2):
        k, m = (p for p in idx if p not in (i, j))
        total += l[i] * l[j] / (144 * l[k] * l[m])
    for i in idx:
        total -= l[i] ** 3 / (720 * prod / l[i])
    return total


def explicit_main_term(logs, L):
    """Hand-expanded polynomial main terms for two, three and four elements."""
    n = len(logs)
    if n == 2:
        return _main_two(logs, L)
    if n == 3:
        return _main_three(logs, L)
    if n == 4:
        return _main_four(logs, L)
    raise ArityMismatch(f"explicit main terms exist for 2, 3 or 4 elements, not {n}")


# --------------------------------------------------------------------------
# oscillatory families


class _Resonance(Exception):
    def __init__(self, m, k, magnitude):
        super().__init__(m, k, magnitude)
        self.m, self.k, self.magnitude = m, k, magnitude


class _Geometry:
    """Logs, fractional parts and membership for one (basis, x) pair."""

    def __init__(self, basis: Basis, x: XValue, w: PrecisionContext):
        self.basis = basis
        self.x = x
        self.w = w
        mp = w.mp
        self.L = x.log(w)
        self.logs = [hp_log(a, w) for a in basis.elements]
        self.fracs = []
        for a in basis.elements:
            _, t = frac_log_ratio(x, a, w)
            self.fracs.append(t)
        self.member = is_member(x, basis)
        self.half = mp.mpf(1) / 2

    def bernoulli_sum(self):
        mp = self.w.mp
        return mp.fsum(b1_star(t, exact_integer=(t == 0) or None) for t in self.fracs)


class _Guard:
    """Checks sine denominators against the resonance thresholds."""

    def __init__(self, digits: int, mp, strict: bool):
        self.warn = mp.mpf(10) ** (10 - digits)
        self.fail = mp.mpf(10) ** (5 - digits)
        self.strict = strict
        self.warnings: list[tuple[int, int, float]] = []

    def __call__(self, s, m, k):
        mag = abs(s)
        if mag < self.warn:
            if self.strict:
                raise _Resonance(m, k, float(mag))
            if mag < self.fail:
                raise ResonantDenominator(m, k, float(mag))
            self.warnings.append((m, k, float(mag)))
        return s


RESEED = 256


def _to_gmpy(v):
    sign, man, exp, _ = v._mpf_
    g = gmpy2.mul_2exp(gmpy2.mpfr(man), exp)
    return -g if sign else g


def _from_gmpy(g, mp):
    num, den = g.as_integer_ratio()
    return mp.mpf(num) / den


class _Phases:
    """cos and sin of ``pi k alpha`` for k = 1, 2, ... by rotation.

    Every RESEED steps the pairs are recomputed from scratch, which bounds
    the rounding drift to a few hundred ulps.
    """

    __slots__ = ("alphas", "mp", "rot", "c", "s", "k")

    def __init__(self, alphas, mp):
        self.alphas = alphas
        self.mp = mp
        self.rot = [(_to_gmpy(mp.cospi(a)), _to_gmpy(mp.sinpi(a))) for a in alphas]
        self.k = 0
        self.c = [None] * len(alphas)
        self.s = [None] * len(alphas)

    def step(self):
        k = self.k + 1
        c, s = self.c, self.s
        if k % RESEED == 1:
            mp = self.mp
            for i, a in enumerate(self.alphas):
                c[i] = _to_gmpy(mp.cospi(k * a))
                s[i] = _to_gmpy(mp.sinpi(k * a))
        else:
            for i, (rc, rs) in enumerate(self.rot):
                ci, si = c[i], s[i]
                c[i] = ci * rc - si * rs
                s[i] = si * rc + ci * rs
        self.k = k


def _shift(r: int, s, c):
    # sin(theta - pi r / 2)
    return (s, -c, -s, c)[r % 4]


def _elementary_symmetric(values, top: int):
    e = [values[0] * 0 + 1] + [values[0] * 0] * top
    for v in values:
        for r in range(top, 0, -1):
            e[r] += e[r - 1] * v
    return e


def _family_kernel(variant: FormulaVariant, n: int, pi) -> Callable:
    """Summand for one pole family as a function of (k, s, c, st, ct).

    ``s[j], c[j]`` are sin and cos of ``pi k log a_j / log a_m`` over the other
    elements and ``st, ct`` those of ``2 pi k log x / log a_m``.
    """
    V = FormulaVariant

    if variant is V.HL2:
        coef = -1 / (2 * pi)

        def term(k, s, c, st, ct):
            # cos(theta - phi) / sin(phi)
            return coef * (ct * c[0] + st * s[0]) / (k * s[0])

    elif variant is V.HL2_COT:
        coef = -1 / (2 * pi)

        def term(k, s, c, st, ct):
            return coef * c[0] * ct / (k * s[0])

    elif variant is V.TRIPLE or variant is V.QUAD:
        quad = variant is V.QUAD
        cpair = -1 / ((8 if quad else 4) * pi)
        ctrip = -1 / ((16 if quad else 8) * pi)
        cquad = 1 / (8 * pi)
        pairs = list(combinations(range(n - 1), 2))

        def term(k, s, c, st, ct):
            acc = 0
            for j in range(n - 1):
                acc += cpair * (ct * c[j] + st * s[j]) / s[j]
            for i, j in pairs:
                # sin(theta + phi_i - phi_j) + sin(theta - phi_i + phi_j)
                num = 2 * st * (c[i] * c[j] + s[i] * s[j])
                acc += ctrip * num / (s[i] * s[j])
            if quad:
                acc += cquad * c[0] * c[1] * c[2] * ct / (s[0] * s[1] * s[2])
            return acc / k

    elif variant is V.TRIPLE_COT:
        coef = -1 / (4 * pi)

        def term(k, s, c, st, ct):
            k0, k1 = c[0] / s[0], c[1] / s[1]
            return coef * ((k0 + k1) * ct + k0 * k1 * st) / k

    elif variant is V.QUAD_COT:
        coef = 1 / (8 * pi)

        def term(k, s, c, st, ct):
            k0, k1, k2 = c[0] / s[0], c[1] / s[1], c[2] / s[2]
            first = -(k0 + k1 + k2) * ct
            second = -(k0 * k1 + k0 * k2 + k1 * k2) * st
            third = k0 * k1 * k2 * ct
            return coef * (first + second + third) / k

    elif variant is V.GENERAL_COT:
        top = n - 1
        coef = 1 / (2**top * pi)

        def term(k, s, c, st, ct):
            cot = [c[j] / s[j] for j in range(top)]
            e = _elementary_symmetric(cot, top)
            acc = 0
            for r in range(1, top + 1):
                acc += e[r] * _shift(r, st, ct)
            return coef * acc / k

    else:
        raise ValueError(f"{variant} has no single-index oscillatory series")
    return term


class _FamilySum:
    """Running partial sum of one pole family, extendable to larger caps."""

    def __init__(self, variant: FormulaVariant, geom: "_Geometry", m: int, guard: "_Guard"):
        w = geom.w
        self.mp = w.mp
        self.prec = w.mp.prec
        self.m = m
        self.guard = guard
        lm = geom.logs[m]
        n = len(geom.logs)
        alphas = [geom.logs[j] / lm for j in range(n) if j != m] + [2 * geom.fracs[m]]
        with gmpy2.context(precision=self.prec):
            self.phases = _Phases(alphas, w.mp)
            self.term = _family_kernel(variant, n, _to_gmpy(w.pi))
            self.warn = _to_gmpy(guard.warn)
            self.sum = gmpy2.mpfr(0)
        self.k = 0

    @property
    def total(self):
        return _from_gmpy(self.sum, self.mp)

    def advance(self, cap: int):
        if cap <= self.k:
            return
        ph, term, warn, guard, m = self.phases, self.term, self.warn, self.guard, self.m
        with gmpy2.context(precision=self.prec):
            acc = self.sum
            for k in range(self.k + 1, cap + 1):
                ph.step()
                s, c = ph.s, ph.c
                for sj in s[:-1]:
                    if abs(sj) < warn:
                        guard(_from_gmpy(sj, self.mp), m, k)
                acc += term(k, s, c, s[-1], c[-1])
            self.sum = acc
        self.k = cap


def oscillatory_general(basis, x, trunc: TruncationSpec, ctx: PrecisionContext | None = None):
    """Cotangent-product series of the general formula; returns (value, warnings)."""
    ctx = ctx or PrecisionContext()
    basis = as_basis(basis)
    if len(basis) < 2:
        raise ArityMismatch("the oscillatory series needs at least two elements")
    x = as_xvalue(x)
    w = working_context(ctx, x, basis[0])
    geom = _Geometry(basis, x, w)
    guard = _Guard(ctx.digits, w.mp, strict=False)
    total = w.mp.zero
    for m in range(len(basis)):
        fam = _FamilySum(FormulaVariant.GENERAL_COT, geom, m, guard)
        fam.advance(trunc.family_cap(geom.logs[m], w.mp))
        total += fam.total
    return ctx.mp.mpf(total), guard.warnings


# --------------------------------------------------------------------------
# the double series of the two-element Schumacher-type formula


def _double_sum(geom: _Geometry, caps: tuple[int, int], guard: _Guard):
    w = geom.w
    mp = w.mp
    N, M = caps
    la, lb = geom.logs
    ta, tb = geom.fracs
    cn = [mp.cospi(2 * n * ta) for n in range(1, N + 1)]
    cm = [mp.cospi(2 * m * tb) for m in range(1, M + 1)]
    ma = [m * m * la * la for m in range(1, M + 1)]
    nb = [n * n * lb * lb for n in range(1, N + 1)]
    scale = la * lb / (w.pi * w.pi)
    with gmpy2.context(precision=mp.prec):
        cn, cm, ma, nb = ([_to_gmpy(v) for v in seq] for seq in (cn, cm, ma, nb))
        warn = _to_gmpy(guard.warn)
        total = gmpy2.mpfr(0)
        for i in range(N):
            row = gmpy2.mpfr(0)
            c_n, b_n = cn[i], nb[i]
            for j in range(M):
                d = ma[j] - b_n
                if abs(d) < warn:
                    guard(_from_gmpy(d, mp), 0, (i + 1, j + 1))
                row += (c_n - cm[j]) / d
            total += row
        total = _from_gmpy(total, mp)
    return scale * total


def thm1_double_sum(a: int, b: int, x, caps: tuple[int, int], ctx: PrecisionContext | None = None):
    """Truncated double cosine series, rows ``n`` outermost, both ascending."""
    ctx = ctx or PrecisionContext()
    basis = as_basis((a, b))
    x = as_xvalue(x)
    N, M = (int(c) for c in caps)
    if N <= 0 or M <= 0:
        return ctx.mp.zero
    w = working_context(ctx, x, basis[0])
    geom = _Geometry(basis, x, w)
    guard = _Guard(ctx.digits, w.mp, strict=False)
    return ctx.mp.mpf(_double_sum(geom, (N, M), guard))


# --------------------------------------------------------------------------
# assembly


class _Evaluator:
    """Fixed parts of one (variant, basis, x) evaluation plus reusable partial sums."""

    def __init__(self, variant, basis, x, ctx: PrecisionContext, extra_digits: int = 0, strict: bool = True):
        self.variant = variant
        self.basis = basis
        self.x = x
        self.ctx = ctx
        self.w = working_context(ctx, x, basis[0], extra=extra_digits)
        w = self.w
        mp = w.mp
        geom = self.geom = _Geometry(basis, x, w)
        self.guard = _Guard(ctx.digits + extra_digits, mp, strict)

        if variant in _EXPLICIT_MAIN:
            self.main = explicit_main_term(geom.logs, geom.L)
        else:
            self.main = _residue_from_logs(geom.logs, geom.L, mp)

        weight = _B1_WEIGHT.get(variant, Fraction(1, 2 ** (len(basis) - 1)))
        bern = -mp.mpf(weight.numerator) / weight.denominator * geom.bernoulli_sum()
        if variant is FormulaVariant.SCHUMACHER2:
            la, lb = geom.logs
            ta, tb = geom.fracs
            bern -= la / (2 * lb) * b2_frac(ta) + lb / (2 * la) * b2_frac(tb)
        self.bern = bern
        self.chi = geom.half if geom.member else mp.zero
        self.families: list[_FamilySum] | None = None

    def _fresh_families(self):
        return [
            _FamilySum(self.variant, self.geom, m, self.guard)
            for m in range(len(self.basis))
        ]

    def oscillatory_at(self, trunc: TruncationSpec):
        """Oscillatory value and per-element term counts for this budget."""
        mp = self.w.mp
        V = FormulaVariant
        if self.variant is V.SINGLE:
            return mp.zero, {}
        if self.variant is V.SCHUMACHER2:
            caps = trunc.caps
            used = {self.basis[0]: caps[0], self.basis[1]: caps[1]}
            return _double_sum(self.geom, caps, self.guard), used
        caps = [trunc.family_cap(l, mp) for l in self.geom.logs]
        if self.families is None or any(f.k > c for f, c in zip(self.families, caps)):
            self.families = self._fresh_families()
        used = {}
        for a, fam, cap in zip(self.basis.elements, self.families, caps):
            fam.advance(cap)
            used[a] = cap
        # fixed pairwise reduction order keeps results reproducible
        return _tree_sum([f.total for f in self.families], mp), used

    def report(self, trunc: TruncationSpec) -> EvalReport:
        osc, used = self.oscillatory_at(trunc)
        out = self.ctx.mp
        main = out.mpf(self.main)
        bern = out.mpf(self.bern)
        osc_out = out.mpf(osc)
        chi = out.mpf(self.chi)
        total = main + bern + osc_out + chi
        return EvalReport(
            variant=self.variant,
            basis=self.basis.elements,
            x=self.x,
            digits=self.ctx.digits,
            truncation=trunc.describe(self.variant),
            main_term=main,
            bernoulli_terms=bern,
            oscillatory=osc_out,
            chi_term=chi,
            total=total,
            rounded_count=int(out.nint(total)),
            terms_used=used,
            resonance_warnings=list(self.guard.warnings),
        )


def _tree_sum(values, mp):
    vals = list(values)
    if not vals:
        return mp.zero
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _prepare(variant, basis, x):
    variant = FormulaVariant.parse(variant)
    basis = as_basis(basis)
    x = as_xvalue(x)
    if variant.arity is not None and len(basis) != variant.arity:
        raise ArityMismatch(
            f"{variant.value} needs {variant.arity} basis element(s), got {len(basis)}"
        )
    if variant is FormulaVariant.SCHUMACHER2 and x <= 1:
        raise DomainError(f"{variant.value} is stated for x > 1, got x = {x}")
    return variant, basis, x


def _with_escalation(build, run):
    """Run once; on a near-resonant denominator retry once at doubled precision."""
    try:
        return run(build(0, True))
    except _Resonance as exc:
        ev = build(None, False)
        try:
            return run(ev)
        except _Resonance:  # pragma: no cover - strict is off in the retry
            raise ResonantDenominator(exc.m, exc.k, exc.magnitude) from None


def evaluate(variant, basis, x, trunc: TruncationSpec | None = None, ctx: PrecisionContext | None = None) -> EvalReport:
    """Evaluate one formula variant at ``x``.

    Raises ArityMismatch when the basis size does not fit the variant and
    DomainError for ``x <= 1`` under the Schumacher-type variant.
    """
    variant, basis, x = _prepare(variant, basis, x)
    ctx = ctx or PrecisionContext(DEFAULT_DIGITS)
    trunc = trunc or TruncationSpec()

    def build(extra, strict):
        extra = ctx.digits if extra is None else extra
        return _Evaluator(variant, basis, x, ctx, extra, strict)

    if not trunc.adaptive:
        return _with_escalation(build, lambda ev: ev.report(trunc))
    return _with_escalation(build, lambda ev: _adaptive(ev, trunc))


def _adaptive(ev: _Evaluator, trunc: TruncationSpec) -> EvalReport:
    tol = ev.ctx.mp.mpf(trunc.tolerance.numerator) / trunc.tolerance.denominator
    current = trunc
    prev = ev.report(current)
    while True:
        if ev.variant is FormulaVariant.SINGLE:
            return prev
        if ev.variant is FormulaVariant.SCHUMACHER2:
            n, m = current.caps
            if max(n, m) * 2 > ADAPTIVE_MAX_CAP:
                return prev
            current = TruncationSpec(current.R, (2 * n, 2 * m), True, current.tolerance, current.max_R)
        else:
            if current.R * 2 > current.max_R:
                return prev
            current = TruncationSpec(current.R * 2, None, True, current.tolerance, current.max_R)
        nxt = ev.report(current)
        if abs(nxt.total - prev.total) < tol:
            return nxt
        prev = nxt


def sweep(variant, basis, x, Rs: Iterable, ctx: PrecisionContext | None = None, caps=None):
    """Yield one report per truncation value, extending the partial sums in place.

    ``Rs`` holds values of R, or of the symmetric cap for the Schumacher-type
    variant.  Ascending sequences reuse every computed term.
    """
    variant, basis, x = _prepare(variant, basis, x)
    ctx = ctx or PrecisionContext(DEFAULT_DIGITS)
    ev = _Evaluator(variant, basis, x, ctx, 0, strict=False)
    for r in Rs:
        if variant is FormulaVariant.SCHUMACHER2:
            c = int(r)
            yield ev.report(TruncationSpec(max(1, c), (c, c)))
        else:
            yield ev.report(TruncationSpec(r))


# total(variant) = total(cotangent form) + weight * grouping_defect
GROUPING_WEIGHT = {
    FormulaVariant.HL2: Fraction(-1, 2),
    FormulaVariant.TRIPLE: Fraction(-3, 4),
    FormulaVariant.QUAD: Fraction(-3, 4),
    FormulaVariant.HL2_COT: Fraction(0),
    FormulaVariant.TRIPLE_COT: Fraction(0),
    FormulaVariant.QUAD_COT: Fraction(0),
    FormulaVariant.GENERAL_COT: Fraction(0),
}


def grouping_defect(basis, x, trunc: TruncationSpec, ctx: PrecisionContext | None = None):
    """Truncation error of the sawtooth series, summed over pole families.

    Uses ``sum_{k<=K} sin(2 pi k t)/k -> -pi B1*(t)``.  Groupings that fold
    these partial sums into the Bernoulli terms differ by a rational multiple
    of this quantity (see GROUPING_WEIGHT), which vanishes as ``R`` grows.
    """
    ctx = ctx or PrecisionContext()
    basis = as_basis(basis)
    x = as_xvalue(x)
    w = working_context(ctx, x, basis[0])
    geom = _Geometry(basis, x, w)
    mp = w.mp
    total = mp.zero
    for l, t in zip(geom.logs, geom.fracs):
        cap = trunc.family_cap(l, mp)
        partial = mp.fsum(mp.sinpi(2 * k * t) / k for k in range(1, cap + 1))
        total += partial / w.pi + b1_star(t, exact_integer=(t == 0) or None)
    return ctx.mp.mpf(total)

"""High-precision primitives used by every counting formula.

Arithmetic is delegated to mpmath.  Each :class:`PrecisionContext` owns a
private mpmath context, so evaluations at different precisions never touch
mpmath's global state and a context can be shared read-only between threads.
"""

from __future__ import annotations

import math
from fractions import Fraction

from mpmath.ctx_mp import MPContext
from mpmath.ctx_mp_python import _mpf as mpf

from .errors import DomainError

__all__ = [
    "DEFAULT_DIGITS",
    "PrecisionContext",
    "hp_log",
    "hp_sincos",
    "b1_star",
    "b2_frac",
    "bessel_j1",
    "frac_log_ratio",
    "working_context",
    "format_fixed",
    "to_fraction",
]

DEFAULT_DIGITS = 50
BESSEL_CROSSOVER = 30


class PrecisionContext:
    """Working decimal precision plus the constants derived from it.

    ``pi`` is computed once; logs of small integers are memoised on first use.
    Wider contexts obtained through :meth:`escalate` are memoised as well.
    """

    __slots__ = ("digits", "mp", "pi", "_logs", "_wider")

    def __init__(self, digits: int = DEFAULT_DIGITS):
        digits = int(digits)
        if digits < 15:
            raise ValueError(f"digits must be >= 15, got {digits}")
        self.digits = digits
        self.mp = MPContext()
        self.mp.dps = digits
        self.pi = +self.mp.pi
        self._logs: dict[int, mpf] = {}
        self._wider: dict[int, PrecisionContext] = {}

    def __reduce__(self):
        return (PrecisionContext, (self.digits,))

    def __repr__(self) -> str:
        return f"PrecisionContext(digits={self.digits})"

    def mpf(self, value) -> mpf:
        if isinstance(value, Fraction):
            return self.mp.mpf(value.numerator) / value.denominator
        return self.mp.mpf(value)

    @property
    def tolerance(self) -> mpf:
        """Relative accuracy every cached constant is certified to."""
        return self.mp.mpf(10) ** (2 - self.digits)

    @property
    def integrality_tolerance(self) -> mpf:
        return self.mp.mpf(10) ** (-(self.digits // 2))

    def escalate(self, extra_digits: int) -> "PrecisionContext":
        extra = max(0, int(extra_digits))
        if extra == 0:
            return self
        wide = self._wider.get(extra)
        if wide is None:
            wide = self._wider.setdefault(extra, PrecisionContext(self.digits + extra))
        return wide


def hp_log(n: int, ctx: PrecisionContext) -> mpf:
    """Natural log of an integer ``n >= 2``, memoised per context."""
    if n < 2:
        raise DomainError(f"hp_log needs n >= 2, got {n}")
    value = ctx._logs.get(n)
    if value is None:
        value = ctx._logs.setdefault(n, ctx.mp.log(n))
    return value


def hp_sincos(theta, ctx: PrecisionContext) -> tuple[mpf, mpf]:
    """(sin theta, cos theta) with the reduction mod 2 pi done in extra precision.

    The reduction runs at ``digits + digits(|theta|) + 10`` so that large
    arguments keep ``ctx.digits`` valid digits after the subtraction.
    """
    mp = ctx.mp
    theta = mp.mpf(theta)
    if not theta:
        return mp.zero, mp.one
    mag_digits = max(0, math.ceil(mp.mag(theta) * math.log10(2)))
    w = ctx.escalate(mag_digits + 10).mp
    th = w.mpf(theta)
    twopi = 2 * w.pi
    r = th - w.nint(th / twopi) * twopi
    return mp.mpf(w.sin(r)), mp.mpf(w.cos(r))


def _floor_frac(t):
    if isinstance(t, mpf):
        ctx = t.context
        return t - ctx.floor(t), ctx
    if isinstance(t, (int, Fraction)):
        return t - math.floor(t), None
    return t - math.floor(t), None


def b1_star(t, tol=None, *, exact_integer: bool | None = None):
    """Periodic first Bernoulli function taking the midpoint 0 at integers.

    ``exact_integer`` short-circuits the floating test when the caller knows
    symbolically whether ``t`` is an integer (e.g. ``x`` is an exact power of
    the base).  Otherwise ``t`` counts as an integer when it lies within
    ``tol`` of one; the default is ``10**(-dps/2)`` for mpf input, ``1e-9``
    for floats and exact comparison for rationals.
    """
    f, ctx = _floor_frac(t)
    if exact_integer is True:
        return ctx.zero if ctx is not None else 0 * f
    if exact_integer is None:
        if tol is None:
            if ctx is not None:
                tol = ctx.mpf(10) ** (-(ctx.dps // 2))
            elif isinstance(f, Fraction) or isinstance(t, int):
                tol = 0
            else:
                tol = 1e-9
        if f <= tol or 1 - f <= tol:
            return ctx.zero if ctx is not None else 0 * f
    half = ctx.mpf(0.5) if ctx is not None else (Fraction(1, 2) if isinstance(f, (Fraction, int)) else 0.5)
    return f - half


def b2_frac(t):
    """Periodic second Bernoulli polynomial ``{t}**2 - {t} + 1/6``."""
    f, ctx = _floor_frac(t)
    sixth = ctx.mpf(1) / 6 if ctx is not None else (Fraction(1, 6) if isinstance(f, (Fraction, int)) else 1 / 6)
    return f * f - f + sixth


def _j1_maclaurin(z: mpf, ctx: PrecisionContext) -> mpf:
    # terms grow to about exp(z) before decaying, so carry that many guard digits
    w = ctx.escalate(math.ceil(float(z) / math.log(10)) + 5)
    mp = w.mp
    h = mp.mpf(z) / 2
    h2 = h * h
    term = h
    total = term
    eps = mp.mpf(10) ** (-w.digits)
    m = 0
    while True:
        m += 1
        term = -term * h2 / (m * (m + 1))
        total += term
        if abs(term) <= eps * abs(total) and m > h:
            break
    return ctx.mp.mpf(total)


def _j1_asymptotic(z: mpf, ctx: PrecisionContext) -> mpf:
    mp = ctx.mp
    eps = mp.mpf(10) ** (-ctx.digits)
    mu = 4
    p = mp.one
    q = mp.zero
    term = mp.one
    prev = mp.inf
    k = 0
    while True:
        k += 1
        nxt = term * (mu - (2 * k - 1) ** 2) / (k * 8 * z)
        if abs(nxt) >= prev or abs(nxt) < eps:
            break
        prev = abs(nxt)
        term = nxt
        # the signs alternate in pairs: +P0, +Q1, -P2, -Q3, +P4, ...
        sign = -1 if (k // 2) % 2 else 1
        if k % 2:
            q += sign * term
        else:
            p += sign * term
    s, c = hp_sincos(z - 3 * ctx.pi / 4, ctx)
    return mp.sqrt(2 / (ctx.pi * z)) * (c * p - s * q)


def bessel_j1(z, ctx: PrecisionContext) -> mpf:
    """Bessel function of the first kind of order one for ``z >= 0``.

    Maclaurin series for small ``z``, Hankel asymptotic expansion above,
    truncated at the smallest term.  The crossover is 30 or, when that is
    larger, the point where the smallest asymptotic term (about ``exp(-2z)``)
    drops below the working precision.
    """
    z = ctx.mp.mpf(z)
    if z < 0:
        raise DomainError("bessel_j1 is defined here for z >= 0 only")
    if not z:
        return ctx.mp.zero
    if z < max(BESSEL_CROSSOVER, 1.2 * ctx.digits):
        return _j1_maclaurin(z, ctx)
    return _j1_asymptotic(z, ctx)


def frac_log_ratio(x, a: int, ctx: PrecisionContext) -> tuple[int, mpf]:
    """Split ``log(x)/log(a)`` into its exact floor and fractional part.

    The floor comes from exact big-integer comparison.  The fractional part is
    exactly zero iff ``x`` is an exact power of ``a``; otherwise it is computed
    with enough extra digits to survive the cancellation against the floor.
    """
    from .basis import as_xvalue
    from .exact import floor_log

    x = as_xvalue(x)
    q = floor_log(a, x)
    if x.is_integer and a**q == x.numerator:
        return q, ctx.mp.zero
    w = ctx.escalate(len(str(q)) + 5)
    ratio = x.log(w) / hp_log(a, w)
    return q, ctx.mp.mpf(ratio - q)


def working_context(ctx: PrecisionContext, x, smallest_base: int = 2, extra: int = 0) -> PrecisionContext:
    """Escalate ``ctx`` so fractional parts of ``log(x)/log(a)`` keep full precision."""
    from .basis import as_xvalue

    x = as_xvalue(x)
    bits = max(1, x.bit_length())
    magnitude = bits / math.log2(smallest_base)
    need = math.ceil(math.log10(magnitude + 1)) + 10 + extra
    return ctx.escalate(need)


def to_fraction(value) -> Fraction:
    """Exact rational value of an mpf (or anything Fraction accepts)."""
    if isinstance(value, mpf):
        sign, man, exp, _ = value._mpf_
        if not man and exp:
            raise ValueError(f"non-finite value {value}")
        return Fraction(-man if sign else man) * (Fraction(2) ** exp)
    return Fraction(value)


def format_fixed(value, places: int) -> str:
    """Fixed-point decimal string, rounded half-to-even from the exact binary value."""
    frac = to_fraction(value)
    scaled = round(frac * 10**places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"

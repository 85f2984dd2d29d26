"""Basis tuples, exact evaluation points and semigroup membership.

A basis ``(a_1, ..., a_n)`` generates the multiplicative semigroup of all
products ``a_1**q_1 * ... * a_n**q_n`` with ``q_i >= 0``.  Evaluation points
are kept exact (:class:`XValue`) so that the characteristic-function terms and
the floor-logs never depend on floating point.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import BasisError, Violation

__all__ = [
    "XValue",
    "Basis",
    "validate_basis",
    "is_member",
    "is_member_squares",
    "factorize",
]

_POW10 = re.compile(r"^\s*1[eE]\+?(\d+)\s*$")
_INT = re.compile(r"^\s*\+?(\d+)\s*$")


@functools.total_ordering
class XValue:
    """An exact evaluation point ``x >= 1``.

    Three forms exist: an explicit integer, an exact power of ten (kept as its
    exponent so that ``log x = E log 10`` never touches the huge integer), and
    a positive rational, used only for the table rows the paper evaluates at
    ``x = 1.1``.
    """

    __slots__ = ("exponent", "_num", "_den")

    def __init__(self, value, *, exponent: int | None = None):
        if exponent is not None:
            if exponent < 0:
                raise ValueError("power-of-ten exponent must be >= 0")
            self.exponent = int(exponent)
            self._num = None
            self._den = 1
            return
        if isinstance(value, XValue):
            self.exponent, self._num, self._den = value.exponent, value._num, value._den
            return
        if isinstance(value, bool):
            raise TypeError("bool is not a valid x")
        if isinstance(value, int):
            frac = Fraction(value)
        elif isinstance(value, Fraction):
            frac = value
        else:
            raise TypeError(f"unsupported x type {type(value).__name__}")
        if frac < 1:
            raise ValueError(f"x must be >= 1, got {frac}")
        self.exponent = None
        self._num = frac.numerator
        self._den = frac.denominator

    @classmethod
    def power_of_ten(cls, exponent: int) -> "XValue":
        return cls(None, exponent=exponent)

    @classmethod
    def parse(cls, text: str) -> "XValue":
        """Accept a decimal integer literal or ``1e<E>`` meaning exactly ``10**E``."""
        m = _POW10.match(text)
        if m:
            return cls.power_of_ten(int(m.group(1)))
        m = _INT.match(text)
        if m:
            return cls(int(m.group(1)))
        raise ValueError(f"cannot parse x from {text!r}; use an integer or 1e<E>")

    @property
    def form(self) -> str:
        if self.exponent is not None:
            return "power_of_ten"
        return "integer" if self._den == 1 else "rational"

    @property
    def numerator(self) -> int:
        if self._num is None:
            self._num = 10**self.exponent
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def is_integer(self) -> bool:
        return self._den == 1

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self._den)

    def __int__(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.numerator

    def log(self, ctx):
        """Natural log at the precision of ``ctx`` (a PrecisionContext)."""
        from .numerics import hp_log

        if self.exponent is not None:
            return self.exponent * hp_log(10, ctx) if self.exponent else ctx.mp.zero
        if self._num == 1 and self._den == 1:
            return ctx.mp.zero
        return ctx.mp.log(self._num) - (ctx.mp.log(self._den) if self._den > 1 else 0)

    def bit_length(self) -> int:
        """Rough size used for precision budgeting: bits of the integer part."""
        if self.exponent is not None:
            return int(self.exponent * math.log2(10)) + 1
        return (self._num // self._den).bit_length()

    def _key(self):
        return (self.numerator, self._den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = _coerce(other)
            if other is None:
                return False
        if not isinstance(other, XValue):
            return NotImplemented
        if self.exponent is not None and other.exponent is not None:
            return self.exponent == other.exponent
        return self._key() == other._key()

    def __lt__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.as_fraction() < other
        if not isinstance(other, XValue):
            return NotImplemented
        if self.exponent is not None and other.exponent is not None:
            return self.exponent < other.exponent
        return self.numerator * other._den < other.numerator * self._den

    def __hash__(self):
        return hash(self.as_fraction())

    def __str__(self) -> str:
        if self.exponent is not None:
            return f"1e{self.exponent}"
        if self._den == 1:
            return str(self._num)
        return f"{self._num}/{self._den}"

    def __repr__(self) -> str:
        return f"XValue({self})"


def _coerce(value) -> XValue | None:
    try:
        return XValue(value)
    except ValueError:
        return None


def as_xvalue(x) -> XValue:
    if isinstance(x, XValue):
        return x
    if isinstance(x, str):
        return XValue.parse(x)
    return XValue(x)


def factorize(n: int) -> dict[int, int]:
    """Trial division; basis elements are small."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class Basis:
    """A validated ascending basis with prime exponent vectors.

    ``strict`` records whether pairwise multiplicative independence was
    enforced; the analytic formulas require it, exact counting does not.
    """

    elements: tuple[int, ...]
    primes: tuple[int, ...]
    exponent_vectors: tuple[tuple[int, ...], ...]
    strict: bool = True

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @functools.cached_property
    def pairwise_coprime(self) -> bool:
        return all(math.gcd(a, b) == 1 for a, b in combinations(self.elements, 2))

    def __str__(self) -> str:
        return ",".join(map(str, self.elements))


def _parallel(u: tuple[int, ...], v: tuple[int, ...]) -> bool:
    # nonnegative, nonzero integer vectors: parallel iff every 2x2 minor vanishes
    return all(u[p] * v[q] == u[q] * v[p] for p, q in combinations(range(len(u)), 2))


def validate_basis(
    elements, *, strict: bool = True, sort: bool = True, check_gcd: bool = True
) -> Basis:
    """Validate a basis, collecting every violated rule before raising.

    With ``sort=True`` (the default) input order is irrelevant and only
    duplicates count as ``NotAscending``.  ``strict=False`` drops the pairwise
    multiplicative-independence rule, which exact enumeration does not need;
    ``check_gcd=False`` additionally drops the gcd rule (membership only).
    """
    elems = [int(e) for e in elements]
    violations: list[Violation] = []
    if not elems:
        raise BasisError(elems, [Violation("Empty")])
    for i, a in enumerate(elems):
        if a < 2:
            violations.append(Violation("ElementBelowTwo", (i,)))
    ordered = sorted(elems) if sort else elems
    for i in range(len(ordered) - 1):
        if ordered[i] >= ordered[i + 1]:
            violations.append(Violation("NotAscending", (i, i + 1)))
    if check_gcd and len(ordered) >= 2 and math.gcd(*ordered) != 1:
        violations.append(Violation("GcdNotOne"))

    usable = all(a >= 2 for a in ordered)
    factors = [factorize(a) for a in ordered] if usable else []
    primes = tuple(sorted({p for f in factors for p in f}))
    vectors = tuple(tuple(f.get(p, 0) for p in primes) for f in factors)
    if strict and usable:
        for i, j in combinations(range(len(ordered)), 2):
            if _parallel(vectors[i], vectors[j]):
                violations.append(Violation("MultiplicativelyDependentPair", (i, j)))
    if violations:
        raise BasisError(elems, violations)
    return Basis(tuple(ordered), primes, vectors, strict)


def as_basis(basis, *, strict: bool = True, check_gcd: bool = True) -> Basis:
    if isinstance(basis, Basis):
        return basis
    return validate_basis(basis, strict=strict, check_gcd=check_gcd)


def _valuation(n: int, a: int) -> tuple[int, int]:
    """Return (v, n // a**v) with v maximal; binary splitting keeps huge n cheap."""
    if n % a:
        return 0, n
    powers = [a]
    while n % (powers[-1] * powers[-1]) == 0:
        powers.append(powers[-1] * powers[-1])
    v = 0
    for i in range(len(powers) - 1, -1, -1):
        q, r = divmod(n, powers[i])
        if r == 0:
            n = q
            v += 1 << i
    return v, n


def is_member(x, basis) -> bool:
    """True iff ``x`` is a product of nonnegative powers of the basis elements."""
    x = as_xvalue(x)
    basis = as_basis(basis, strict=False, check_gcd=False)
    if not x.is_integer:
        return False
    n = x.numerator
    if basis.pairwise_coprime:
        # each element's prime support is private, so its exponent is forced
        for a in basis.elements:
            _, n = _valuation(n, a)
        return n == 1
    elems = sorted(basis.elements, reverse=True)

    def dfs(value: int, i: int) -> bool:
        if value == 1:
            return True
        if i == len(elems):
            return False
        a = elems[i]
        while True:
            if dfs(value, i + 1):
                return True
            value, r = divmod(value, a)
            if r:
                return False

    return dfs(n, 0)


def is_member_squares(x, a: int, b: int) -> bool:
    """True iff ``x == a**(p*p) * b**(q*q)`` for some integers ``p, q >= 0``."""
    from .exact import floor_log

    x = as_xvalue(x)
    if not x.is_integer:
        return False
    n = x.numerator
    qmax = math.isqrt(floor_log(b, x))
    bq = 1
    for q in range(qmax + 1):
        bq = b ** (q * q)
        if bq > n:
            break
        cof, r = divmod(n, bq)
        if r:
            continue
        e = floor_log(a, XValue(cof))
        if a**e == cof and math.isqrt(e) ** 2 == e:
            return True
    return False

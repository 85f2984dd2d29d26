"""Exact integer oracles.

Everything here is big-integer arithmetic only: the floor-logs decide
``base**e * divisor <= x`` by multiplication and comparison, so the counts stay
trustworthy at ``x = 10**(10**5)`` where double-precision logs misrank
borderline powers.
"""

from __future__ import annotations

import heapq
import math

from .basis import as_basis, as_xvalue
from .errors import DivisorExceedsX, DomainError

__all__ = [
    "floor_log",
    "count_smooth",
    "generate_smooth",
    "SmoothStream",
    "count_squares_exact",
]


def _ilog(base: int, p: int, t: int) -> int:
    """Largest ``e >= 0`` with ``base**e * t <= p``; requires ``1 <= t <= p``."""
    if base == 2:
        e = p.bit_length() - t.bit_length()
        return e if (t << e) <= p else e - 1
    # a float estimate lands within one step; exact comparisons settle it
    e = max(0, int((math.log2(p) - math.log2(t)) / math.log2(base)))
    v = base**e * t
    while v > p:
        v //= base
        e -= 1
    v *= base
    while v <= p:
        v *= base
        e += 1
    return e


def floor_log(base: int, x, divisor: int = 1) -> int:
    """Largest ``e`` with ``base**e * divisor <= x``, decided exactly."""
    if base < 2:
        raise DomainError(f"base must be >= 2, got {base}")
    x = as_xvalue(x)
    p, t = x.numerator, x.denominator * divisor
    if t > p:
        raise DivisorExceedsX(f"divisor {divisor} exceeds x = {x}")
    return _ilog(base, p, t)


def count_smooth(basis, x) -> int:
    """Number of exponent tuples with ``prod a_i**q_i <= x`` (nested floor-log sum).

    The largest element drives the outermost loop, which keeps the number of
    iterations small; the innermost level is a single floor-log.
    """
    basis = as_basis(basis, strict=False)
    x = as_xvalue(x)
    p = x.numerator
    elems = sorted(basis.elements, reverse=True)
    last = len(elems) - 1

    def rec(t: int, i: int) -> int:
        a = elems[i]
        if i == last:
            return _ilog(a, p, t) + 1
        total = 0
        while t <= p:
            total += rec(t, i + 1)
            t *= a
        return total

    return rec(x.denominator, 0)


class _Candidate:
    __slots__ = ("log", "exps", "value")

    def __init__(self, log, exps, value):
        self.log = log
        self.exps = exps
        self.value = value

    def __lt__(self, other):
        d = self.log - other.log
        if abs(d) > 1e-9:
            return d < 0
        return self.value < other.value


class SmoothStream:
    """Ascending iterator over semigroup members up to a limit.

    Candidates are exponent tuples ordered by their log; near-ties fall back to
    exact integer comparison.  Each tuple is generated once by only bumping
    exponents at or after its last nonzero position.  Single consumer.
    """

    def __init__(self, basis, limit):
        self.basis = as_basis(basis, strict=False)
        self.limit = as_xvalue(limit)
        self._logs = [math.log(a) for a in self.basis.elements]
        n = len(self.basis)
        self._heap = [_Candidate(0.0, (0,) * n, 1)]
        self._last = None

    def __iter__(self):
        return self

    def __next__(self) -> int:
        elems = self.basis.elements
        while self._heap:
            cand = heapq.heappop(self._heap)
            if cand.value > self.limit:
                self._heap.clear()
                break
            start = max((i for i, e in enumerate(cand.exps) if e), default=0)
            for i in range(start, len(elems)):
                exps = cand.exps[:i] + (cand.exps[i] + 1,) + cand.exps[i + 1:]
                heapq.heappush(
                    self._heap,
                    _Candidate(cand.log + self._logs[i], exps, cand.value * elems[i]),
                )
            if cand.value == self._last:
                continue
            self._last = cand.value
            return cand.value
        raise StopIteration


def generate_smooth(basis, limit) -> SmoothStream:
    return SmoothStream(basis, limit)


def count_squares_exact(a: int, b: int, x) -> int:
    """Number of pairs ``(p, q)`` with ``a**(p*p) * b**(q*q) <= x``."""
    if not (2 <= a < b) or math.gcd(a, b) != 1:
        raise DomainError(f"need 2 <= a < b with gcd(a, b) = 1, got ({a}, {b})")
    x = as_xvalue(x)
    p, den = x.numerator, x.denominator
    kmax = math.isqrt(_ilog(b, p, den))
    total = 1 + kmax
    bk2 = 1
    for k in range(kmax + 1):
        total += math.isqrt(_ilog(a, p, den * bk2))
        bk2 *= b ** (2 * k + 1)
    return total

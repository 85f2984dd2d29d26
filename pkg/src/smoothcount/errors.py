"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class SmoothCountError(Exception):
    """Base class for every error raised by smoothcount."""


@dataclass(frozen=True)
class Violation:
    """One failed basis rule.  ``indices`` point into the sorted basis."""

    kind: str
    indices: tuple[int, ...] = ()

    def __str__(self) -> str:
        if self.indices:
            return f"{self.kind}({', '.join(map(str, self.indices))})"
        return self.kind


class BasisError(SmoothCountError, ValueError):
    def __init__(self, elements, violations):
        self.elements = tuple(elements)
        self.violations = tuple(violations)
        rules = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid basis {self.elements}: {rules}")

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


class DomainError(SmoothCountError, ValueError):
    pass


class DivisorExceedsX(DomainError):
    pass


class ArityMismatch(SmoothCountError, ValueError):
    pass


class ResonantDenominator(SmoothCountError, ArithmeticError):
    """A sine denominator fell below what the working precision can resolve."""

    def __init__(self, m: int, k: int, magnitude):
        self.m = m
        self.k = k
        self.magnitude = magnitude
        super().__init__(
            f"resonant denominator in pole family {m} at k={k}: |sin| = {float(magnitude):.3e}"
        )

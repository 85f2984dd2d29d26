"""Counting products of powers of a fixed set of integers.

Exact counts come from big-integer floor-logs; analytic counts come from
residue main terms plus truncated oscillatory series at arbitrary precision.
"""

from .analytic import (
    EvalReport,
    FormulaVariant,
    LaurentSeries,
    TruncationSpec,
    evaluate,
    explicit_main_term,
    grouping_defect,
    oscillatory_general,
    residue_main_term,
    sweep,
    thm1_double_sum,
)
from .basis import Basis, XValue, is_member, is_member_squares, validate_basis
from .errors import (
    ArityMismatch,
    BasisError,
    DivisorExceedsX,
    DomainError,
    ResonantDenominator,
    SmoothCountError,
)
from .exact import SmoothStream, count_smooth, count_squares_exact, floor_log, generate_smooth
from .numerics import (
    PrecisionContext,
    b1_star,
    b2_frac,
    bessel_j1,
    frac_log_ratio,
    hp_log,
    hp_sincos,
)
from .squares import SquaresTruncation, n2_formula
from .tables import PRESETS, get_preset

__version__ = "0.1.0"

__all__ = [
    "ArityMismatch",
    "Basis",
    "BasisError",
    "DivisorExceedsX",
    "DomainError",
    "EvalReport",
    "FormulaVariant",
    "LaurentSeries",
    "PRESETS",
    "PrecisionContext",
    "ResonantDenominator",
    "SmoothCountError",
    "SmoothStream",
    "SquaresTruncation",
    "TruncationSpec",
    "XValue",
    "b1_star",
    "b2_frac",
    "bessel_j1",
    "count_smooth",
    "count_squares_exact",
    "evaluate",
    "explicit_main_term",
    "floor_log",
    "frac_log_ratio",
    "generate_smooth",
    "get_preset",
    "grouping_defect",
    "hp_log",
    "hp_sincos",
    "is_member",
    "is_member_squares",
    "n2_formula",
    "oscillatory_general",
    "residue_main_term",
    "sweep",
    "thm1_double_sum",
    "validate_basis",
]

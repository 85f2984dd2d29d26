"""Published table rows: evaluation points, truncations, counts and printed values.

Printed values are kept as strings, digit for digit.  Rows whose ``x`` column
reads 1 are evaluated at ``x = 11/10`` when the table says so, otherwise at
``x = 1``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

from .analytic import EvalReport, FormulaVariant, TruncationSpec, evaluate
from .basis import XValue
from .exact import count_smooth, count_squares_exact
from .numerics import PrecisionContext
from .squares import SquaresTruncation, n2_formula

__all__ = ["TableRow", "TablePreset", "PRESETS", "get_preset", "preset_checksum"]

DESK_SCALE_EXPONENT = 10**4  # rows at x >= 10**(10**4) need --force


@dataclass(frozen=True)
class TableRow:
    index: int
    label: str
    x: XValue
    count: int
    printed: str
    truncation: TruncationSpec | SquaresTruncation

    @property
    def beyond_desk_scale(self) -> bool:
        return self.x.exponent is not None and self.x.exponent >= DESK_SCALE_EXPONENT

    @property
    def gated(self) -> bool:
        """Rows up to 10**10 carry the digit-agreement guarantee."""
        return self.x.exponent is None or self.x.exponent <= 10


@dataclass(frozen=True)
class TablePreset:
    id: str
    title: str
    variant: FormulaVariant | str
    basis: tuple[int, ...]
    rows: tuple[TableRow, ...]

    def exact(self, row: TableRow) -> int:
        if self.variant == "squares":
            return count_squares_exact(*self.basis, row.x)
        return count_smooth(self.basis, row.x)

    def formula(self, row: TableRow, ctx: PrecisionContext) -> EvalReport:
        if self.variant == "squares":
            return n2_formula(*self.basis, row.x, row.truncation, ctx)
        return evaluate(self.variant, self.basis, row.x, row.truncation, ctx)


def _x(label: str) -> XValue:
    if label == "1.1":
        return XValue(Fraction(11, 10))
    return XValue.parse(label)


def _rows(spec, make_trunc):
    out = []
    for i, (label, count, printed, budget) in enumerate(spec):
        out.append(TableRow(i, label, _x(label), count, printed, make_trunc(budget)))
    return tuple(out)


def _caps(n):
    return TruncationSpec(n, (n, n))


def _r(R):
    return TruncationSpec(R)


def _sq(n):
    return SquaresTruncation((n, n), 400)


_TABLE1 = [
    ("1.1", 1, "1.0510201857955517", 4),
    ("10", 7, "7.0071497373839231", 22),
    ("1e2", 20, "20.0045160354084706", 10),
    ("1e3", 40, "40.0039084310672772", 12),
    ("1e4", 67, "67.0408408937206653", 20),
    ("1e5", 101, "101.05072154439969785", 28),
    ("1e6", 142, "142.01315000789587358", 70),
    ("1e7", 190, "190.00707389223323501", 110),
    ("1e8", 244, "244.00659912032029415", 140),
    ("1e9", 306, "306.00585869480145596", 160),
    ("1e10", 376, "376.02126583465866742", 170),
    ("1e100", 35084, "35084.0568926232894816675", 2000),
    ("1e1000", 3483931, "3483931.035272714689991309386", 4000),
]

_TABLE2 = [
    ("1", 1, "1.00408281281244794423184044310637662236", 1),
    ("10", 7, "7.01039536792580652845911613960427072715", 6),
    ("1e2", 20, "20.00554687989157075178992137362449803027", 10),
    ("1e3", 40, "40.00416733658863125098651349198857667561", 26),
    ("1e4", 67, "67.04067163854917851848072234444363738009", 32),
    ("1e5", 101, "101.00383710643693392983460661037688277109", 44),
    ("1e6", 142, "142.00519665851176957826409909346411626717", 60),
    ("1e7", 190, "190.00431172466646336030921684292744206625", 100),
    ("1e8", 244, "244.00043300366963526250817238561664826018", 122),
    ("1e9", 306, "306.00450681431786167717856515798365069396", 146),
    ("1e10", 376, "376.02231447192801988487484982661961706561", 160),
    ("1e100", 35084, "35084.03451234481158685735036751788214481906", 3000),
    ("1e1000", 3483931, "3483931.03067546896021243171738747049589388966", 3000),
    ("1e10000", 348149087, "348149087.05625852937187129720297862230958308491", 24000),
    ("1e100000", 34812470748, "34812470748.06400873722492550333469431071713138958", 200000),
]

_TABLE3 = [
    ("1", 1, "1.0191146914343678209209456", 3),
    ("10", 9, "9.0066388420020729763649195", 11),
    ("1e2", 34, "34.01798108016701636663657078", 32),
    ("1e3", 86, "86.01831146911104727455077198", 40),
    ("1e4", 175, "175.01259815271196528318821070", 52),
    ("1e5", 313, "313.01116052291470126065468770", 100),
    ("1e6", 507, "507.04384962202822061525989835", 104),
    ("1e7", 768, "768.05762686767314864195183397", 110),
    ("1e8", 1105, "1105.00435666776355760375109758", 260),
    ("1e9", 1530, "1530.00198789289107971841182114", 300),
    ("1e10", 2053, "2053.01709151724653660944693303", 306),
    ("1e100", 1697191, "1697191.10060827971167051326275935", 20000),
]

_TABLE4 = [
    ("1", 1, "1.030388812940249824617233653730019551", 3),
    ("10", 10, "10.01263249440259984789405319823431872556", 3),
    ("1e2", 46, "46.03668521491726375130238293886497852216", 20),
    ("1e3", 141, "141.01285390547424275647701138240776403195", 80),
    ("1e4", 338, "338.0186997720522261698185344005048234745", 80),
    ("1e5", 694, "694.00540895426731024839939099335158382934", 100),
    ("1e6", 1273, "1273.02115574787663113791230619711970129327", 1500),
    ("1e7", 2155, "2155.01133325568473975698180880511876853632", 1500),
    ("1e8", 3427, "3427.01611847162744035197962908126411814549", 1500),
    ("1e9", 5194, "5194.03771424320772544603355297308020543638", 1600),
    ("1e10", 7575, "7575.01767118495435682818874877606239707862", 9000),
]

_TABLE5 = [
    ("1.1", 1, "1.077194794603379", 1),
    ("10", 4, "4.069103424005291", 1),
    ("1e2", 7, "7.000949506610362", 5),
    ("1e3", 9, "9.086395912838084", 3),
    ("1e4", 11, "11.038613589829053", 5),
    ("1e5", 15, "15.012706923272531", 5),
    ("1e6", 17, "17.046462385363300", 5),
    ("1e7", 18, "18.408421860888305", 9),
    ("1e8", 22, "22.127760008955621", 6),
    ("1e9", 24, "24.034210155019944", 8),
    ("1e10", 26, "26.009844154207983", 9),
    ("1e100", 226, "226.001668111078420", 39),
    ("1e1000", 2122, "2122.031291011313557", 168),
    ("1e10000", 20886, "20886.032472386492101", 400),
    ("1e100000", 207756, "207756.0303040763527672", 1000),
    ("1e1000000", 2074033, "2074033.0733802760244109", 1400),
]

PRESETS: dict[str, TablePreset] = {
    "table1": TablePreset("table1", "N_{2,3}(x), double cosine series", FormulaVariant.SCHUMACHER2, (2, 3), _rows(_TABLE1, _caps)),
    "table2": TablePreset("table2", "N_{2,3}(x), cosecant series", FormulaVariant.HL2, (2, 3), _rows(_TABLE2, _r)),
    "table3": TablePreset("table3", "N_{2,3,5}(x)", FormulaVariant.TRIPLE, (2, 3, 5), _rows(_TABLE3, _r)),
    "table4": TablePreset("table4", "N_{2,3,5,7}(x)", FormulaVariant.QUAD, (2, 3, 5, 7), _rows(_TABLE4, _r)),
    "table5": TablePreset("table5", "N^(2)_{2,3}(x), Bessel series", "squares", (2, 3), _rows(_TABLE5, _sq)),
}


def get_preset(name: str) -> TablePreset:
    key = str(name).lower()
    if key.isdigit():
        key = f"table{key}"
    try:
        return PRESETS[key]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose one of {', '.join(PRESETS)}") from None


def preset_checksum(preset: TablePreset) -> str:
    """SHA-256 over the embedded (x, count, printed) triples."""
    h = hashlib.sha256()
    for row in preset.rows:
        h.update(f"{row.label}|{row.count}|{row.printed}\n".encode())
    return h.hexdigest()

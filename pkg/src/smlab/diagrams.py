"""Band-level statistics of trapezia and of glued families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .bcd import BCD, grid
from .machine import Computation, SMachineError
from .words import A, LengthProfile, Word, count_kind, modified_length, project_base


@dataclass(frozen=True)
class TrapeziumStats:
    computation: Computation
    height: int
    base_length: int
    band_cells: Tuple[int, ...]
    area: int
    bottom: Word
    top: Word
    left_side: Word
    right_side: Word
    perimeter_combinatorial: int
    perimeter_modified: Fraction

    @property
    def side_length(self) -> int:
        return len(self.left_side)


@dataclass(frozen=True)
class GluedStats:
    trapezium: TrapeziumStats
    copies: int
    area: int
    perimeter: int

    @property
    def height(self) -> int:
        return self.trapezium.height

    @property
    def base_length(self) -> int:
        return self.trapezium.base_length


def trapezium_stats(c: Computation, p: LengthProfile) -> TrapeziumStats:
    if not c.history:
        raise SMachineError("a trapezium needs a non-empty computation")
    W, W2 = c.words[0], c.words[-1]
    perim = len(W) + len(W2) + len(c.left_side) + len(c.right_side)
    modified = sum(
        (modified_length(x, p) for x in (W, W2, c.left_side, c.right_side)),
        Fraction(0),
    )
    return TrapeziumStats(
        computation=c,
        height=len(c.history),
        base_length=len(project_base(W)),
        band_cells=c.step_cells,
        area=sum(c.step_cells),
        bottom=W,
        top=W2,
        left_side=c.left_side,
        right_side=c.right_side,
        perimeter_combinatorial=perim,
        perimeter_modified=modified,
    )


@dataclass(frozen=True)
class BandViolation:
    step: int
    cells: int
    low: int
    high: int


def check_band_bounds(t: TrapeziumStats, L: int) -> List[BandViolation]:
    """Bands whose cell count leaves ``[l_a-(L-1)l_b, l_a+(L+1)l_b]``; empty
    when all bands comply."""
    bad = []
    lb = t.base_length
    for j, cells in enumerate(t.band_cells):
        la = count_kind(t.computation.words[j + 1], A)
        low, high = la - (L - 1) * lb, la + (L + 1) * lb
        if not low <= cells <= high:
            bad.append(BandViolation(j, cells, low, high))
    return bad


def check_area_bound(t: TrapeziumStats) -> float:
    """``area / (h (|W|_a + |W'|_a + log2 h + 1))``."""
    h = t.height
    wa = count_kind(t.bottom, A) + count_kind(t.top, A)
    return t.area / (h * (wa + math.log2(h) + 1))


def glue(t: TrapeziumStats, m: int) -> GluedStats:
    """Place ``m`` copies side by side; needs equal side labels."""
    if m < 1:
        raise ValueError("need at least one copy")
    if t.left_side != t.right_side:
        raise SMachineError("side labels differ; copies cannot be glued")
    perimeter = 2 * t.side_length + m * (len(t.bottom) + len(t.top))
    return GluedStats(t, m, m * t.area, perimeter)


def bcd_of(t: Union[TrapeziumStats, GluedStats]) -> BCD:
    """Every maximal theta-band crosses every maximal q-band."""
    if isinstance(t, GluedStats):
        return grid(t.height, t.copies * t.base_length)
    return grid(t.height, t.base_length)


def lower_bound_ratio(g: GluedStats) -> Optional[float]:
    """``area / (d^2 log2 d)``; undefined for ``d <= 1``."""
    d = g.perimeter
    if d <= 1:
        return None
    return g.area / (d * d * math.log2(d))

"""Family sweeps behind the CLI: counter runs, the composed pump family and
the glued lower-bound diagrams."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence

from .adding import build_zmachine, full_count_history, full_count_length, z_word
from .bcd import dispersion
from .composition import compose, composed_length, pump_history, pump_machine, pump_word, simulate_composed
from .diagrams import GluedStats, TrapeziumStats, check_band_bounds, glue, lower_bound_ratio, trapezium_stats
from .machine import DEFAULT_BUDGET, BudgetExceeded, Computation, computation_stats, run_history
from .bcd import grid
from .words import LengthProfile

DECIMALS = 12


class InvariantViolation(RuntimeError):
    pass


def fmt(x) -> str:
    """Integers verbatim; rationals and floats with a fixed number of decimals."""
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        scaled = round(x * 10 ** DECIMALS)
        sign = "-" if scaled < 0 else ""
        whole, frac = divmod(abs(scaled), 10 ** DECIMALS)
        return f"{sign}{whole}.{frac:0{DECIMALS}d}"
    return f"{x:.{DECIMALS}f}"


# -- adding machine ---------------------------------------------------------

@dataclass(frozen=True)
class CountRun:
    n: int
    length: int
    formula: int
    width: int
    area: int

    @property
    def within_bounds(self) -> bool:
        return 2 ** self.n <= self.length <= 6 * 2 ** self.n


def count_tape(n: int, alphabet: Sequence[str]) -> List[str]:
    return [alphabet[i % len(alphabet)] for i in range(n)]


def adding_computation(n: int, alphabet: Sequence[str] = ("a",), budget: int = DEFAULT_BUDGET) -> Computation:
    tape = count_tape(n, alphabet)
    if full_count_length(n) > budget:
        raise BudgetExceeded(f"full count of length {full_count_length(n)} exceeds the step budget {budget}")
    m = build_zmachine(tuple(dict.fromkeys(alphabet)))
    return run_history(z_word(tape), full_count_history(tape), m, budget=budget)


def adding_run(n: int, alphabet: Sequence[str] = ("a",), budget: int = DEFAULT_BUDGET) -> CountRun:
    c = adding_computation(n, alphabet, budget)
    length, width, area = computation_stats(c)
    return CountRun(n, length, full_count_length(n), width, area)


# -- composed pump family ---------------------------------------------------

@lru_cache(maxsize=1)
def composed_pump():
    return compose(pump_machine())


def pump_base(n: int) -> Computation:
    return run_history(pump_word(0), pump_history(n), pump_machine())


def composed_computation(n: int, budget: int = DEFAULT_BUDGET) -> Computation:
    if composed_length(n) > budget:
        raise BudgetExceeded(f"composed run of length {composed_length(n)} exceeds the step budget {budget}")
    return simulate_composed(pump_base(n), composed_pump(), budget=budget).computation


def composed_profile() -> LengthProfile:
    return LengthProfile.default(composed_pump().relation_length())


def composed_trapezium(n: int, budget: int = DEFAULT_BUDGET) -> TrapeziumStats:
    return trapezium_stats(composed_computation(n, budget), composed_profile())


@dataclass(frozen=True)
class ExperimentRecord:
    n: int
    l_n: int
    width: int
    area: int
    perimeter_comb: int
    perimeter_mod: Fraction
    dispersion: Fraction
    log2_growth: Optional[float]
    width_minus_n: int
    area_over_llogl: Optional[float]


CSV_HEADER = [
    "n",
    "l_n",
    "width",
    "area",
    "perimeter_comb",
    "perimeter_mod",
    "dispersion",
    "log2_growth",
    "width_minus_n",
    "area_over_llogl",
]


def compose_records(n_max: int, budget: int = DEFAULT_BUDGET) -> List[ExperimentRecord]:
    L = composed_pump().relation_length()
    out: List[ExperimentRecord] = []
    prev = None
    for n in range(1, n_max + 1):
        t = composed_trapezium(n, budget)
        if t.height != composed_length(n):
            raise InvariantViolation(f"n={n}: length {t.height} differs from {composed_length(n)}")
        if check_band_bounds(t, L):
            raise InvariantViolation(f"n={n}: band bound violated")
        _, width, _ = computation_stats(t.computation)
        l_n = t.height
        growth = math.log2(l_n / prev) if prev else None
        ratio = t.area / (l_n * math.log2(l_n)) if l_n > 1 else None
        disp = dispersion(grid(t.height, t.base_length))
        out.append(ExperimentRecord(n, l_n, width, t.area, t.perimeter_combinatorial, t.perimeter_modified, disp, growth, width - n, ratio))
        prev = l_n
    return out


def records_to_csv(records: Sequence[ExperimentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([fmt(getattr(r, k)) for k in CSV_HEADER])
    return buf.getvalue()


# -- glued lower-bound family -----------------------------------------------

@dataclass(frozen=True)
class GluedRow:
    n: int
    l_n: int
    trapezium_area: int
    glued: GluedStats
    ratio: Optional[float]

    @property
    def perimeter(self) -> int:
        return self.glued.perimeter

    @property
    def area(self) -> int:
        return self.glued.area


def glued_row(n: int, budget: int = DEFAULT_BUDGET) -> GluedRow:
    """``l(n)`` copies of the composed pump trapezium glued side by side.

    The ratio is left out for ``n = 1``, where the family has a single pump
    step in each direction and no asymptotic content.
    """
    t = composed_trapezium(n, budget)
    g = glue(t, t.height)
    ratio = lower_bound_ratio(g) if n >= 2 else None
    return GluedRow(n, t.height, t.area, g, ratio)

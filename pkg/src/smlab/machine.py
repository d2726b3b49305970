"""S-machines: rules, admissible words, rule application and computations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .words import (
    A,
    Q,
    Letter,
    Word,
    aletter,
    count_kind,
    invert,
    qletter,
    reduce,
    tletter,
)

DEFAULT_BUDGET = 10_000_000


class SMachineError(ValueError):
    pass


class NotAdmissible(SMachineError):
    def __init__(self, position: int, reason: str):
        super().__init__(f"not admissible at position {position}: {reason}")
        self.position = position


class NotApplicable(SMachineError):
    def __init__(self, rule: "RuleRef", sector: int, reason: str, step: Optional[int] = None):
        where = f"step {step}: " if step is not None else ""
        super().__init__(f"{where}{format_ref(rule)} not applicable at sector {sector}: {reason}")
        self.rule = rule
        self.sector = sector
        self.step = step


class BudgetExceeded(SMachineError):
    pass


class RuleRef(NamedTuple):
    name: str
    sign: int = 1

    def inverse(self) -> "RuleRef":
        return RuleRef(self.name, -self.sign)


def format_ref(r: RuleRef) -> str:
    return r.name if r.sign > 0 else r.name + "^-1"


def parse_ref(token: str) -> RuleRef:
    if token.endswith("^-1"):
        return RuleRef(token[:-3], -1)
    return RuleRef(token, 1)


def is_reduced_history(h: Sequence[RuleRef]) -> bool:
    return all(h[i + 1] != h[i].inverse() for i in range(len(h) - 1))


@dataclass(frozen=True)
class RulePart:
    """``v k u -> v2 k2 u2`` for Q-part ``index``; ``v``/``v2`` live in the
    tape part ``index - 1`` and ``u``/``u2`` in tape part ``index``."""

    index: int
    v: Word
    k: str
    u: Word
    v2: Word
    k2: str
    u2: Word

    def swapped(self) -> "RulePart":
        return RulePart(self.index, self.v2, self.k2, self.u2, self.v, self.k, self.u)

    def relation_length(self) -> int:
        return len(self.v) + len(self.u) + len(self.v2) + len(self.u2) + 4


def simple_part(index: int, k: str, k2: Optional[str] = None, v2: Word = (), u2: Word = ()) -> RulePart:
    return RulePart(index, (), k, (), tuple(v2), k if k2 is None else k2, tuple(u2))


@dataclass(frozen=True)
class Rule:
    """A positive rule. ``commuting[t]`` is the set of tape symbols of part
    ``t`` that commute with the rule; index 0 and N are always empty."""

    name: str
    parts: Tuple[RulePart, ...]
    commuting: Tuple[FrozenSet[str], ...]


@dataclass(frozen=True)
class SMachine:
    name: str
    q_parts: Tuple[FrozenSet[str], ...]
    tape_parts: Tuple[FrozenSet[str], ...]
    rules: Tuple[Rule, ...]
    stop_word: Word = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        N = len(self.q_parts)
        if N < 1:
            raise SMachineError("a machine needs at least one Q-part")
        if len(self.tape_parts) != N + 1 or self.tape_parts[0] or self.tape_parts[N]:
            raise SMachineError("tape_parts must list Y_0..Y_N with Y_0 and Y_N empty")
        seen = set()
        for i, qp in enumerate(self.q_parts):
            if not qp:
                raise SMachineError(f"Q-part {i + 1} is empty")
            if seen & qp:
                raise SMachineError("Q-parts must be disjoint")
            seen |= qp
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise SMachineError("duplicate rule names")
        for r in self.rules:
            self._validate_rule(r)

    def _validate_rule(self, r: Rule) -> None:
        N = self.N
        if len(r.parts) != N or len(r.commuting) != N + 1:
            raise SMachineError(f"rule {r.name}: expected {N} parts")
        for t in range(N + 1):
            if not r.commuting[t] <= self.tape_parts[t]:
                raise SMachineError(f"rule {r.name}: commuting set of Y_{t} is not a subset of Y_{t}")
        for i, p in enumerate(r.parts, start=1):
            if p.index != i:
                raise SMachineError(f"rule {r.name}: part {i} carries index {p.index}")
            if p.k not in self.q_parts[i - 1] or p.k2 not in self.q_parts[i - 1]:
                raise SMachineError(f"rule {r.name}: state letters of part {i} are not in Q_{i}")
            for w, t in ((p.v, i - 1), (p.v2, i - 1), (p.u, i), (p.u2, i)):
                for x in w:
                    if x.kind != A or x.part != t or x.symbol not in self.tape_parts[t]:
                        raise SMachineError(f"rule {r.name}: letter {x} of part {i} is not in Y_{t}")
                if reduce(w) != tuple(w):
                    raise SMachineError(f"rule {r.name}: part {i} words must be reduced")

    @property
    def N(self) -> int:
        return len(self.q_parts)

    def rule(self, name: str) -> Rule:
        table = self._cache.get("rules")
        if table is None:
            table = self._cache["rules"] = {r.name: r for r in self.rules}
        try:
            return table[name]
        except KeyError:
            raise SMachineError(f"unknown rule {name!r}") from None

    def refs(self) -> List[RuleRef]:
        return [RuleRef(r.name, s) for r in self.rules for s in (1, -1)]

    def q_part_of(self, symbol: str) -> int:
        table = self._cache.get("qindex")
        if table is None:
            table = self._cache["qindex"] = {s: i + 1 for i, qp in enumerate(self.q_parts) for s in qp}
        try:
            return table[symbol]
        except KeyError:
            raise SMachineError(f"unknown state letter {symbol!r}") from None

    def relation_length(self) -> int:
        """Maximal length L of a defining relation."""
        best = 4 if any(any(c) for r in self.rules for c in r.commuting) else 0
        for r in self.rules:
            for p in r.parts:
                best = max(best, p.relation_length())
        return best

    def plan(self, ref: RuleRef):
        key = ("plan", ref)
        got = self._cache.get(key)
        if got is None:
            got = self._cache[key] = _compile(self, ref)
        return got


def _compile(m: SMachine, ref: RuleRef):
    rule = m.rule(ref.name)
    N = m.N
    per_part = []
    for p in rule.parts:
        if ref.sign < 0:
            p = p.swapped()
        j = p.index
        pos = (p.k, qletter(j, p.k2, 1), p.v, p.u, p.v2, p.u2, j, j % N + 1)
        neg = (p.k, qletter(j, p.k2, -1), invert(p.u), invert(p.v), invert(p.u2), invert(p.v2), j % N + 1, j)
        per_part.append((pos, neg))
    return per_part, rule.commuting


# -- admissible words -------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    qs: Tuple[Letter, ...]
    sectors: Tuple[Word, ...]
    tapes: Tuple[int, ...]

    def word(self) -> Word:
        out: list = []
        for i, q in enumerate(self.qs):
            out.append(q)
            if i < len(self.sectors):
                out.extend(self.sectors[i])
        return tuple(out)

    def pairs(self) -> List[Tuple[Letter, Optional[Word]]]:
        return [(q, self.sectors[i] if i < len(self.sectors) else None) for i, q in enumerate(self.qs)]


def check_admissible(w: Sequence[Letter], m: SMachine) -> Decomposition:
    """Split ``w`` as ``q1 u1 q2 ... q_n`` and check the part constraints on
    every sector and every consecutive pair of state letters."""
    if not w:
        raise NotAdmissible(0, "empty word")
    if w[0].kind != Q:
        raise NotAdmissible(0, "does not start with a state letter")
    if w[-1].kind != Q:
        raise NotAdmissible(len(w) - 1, "does not end with a state letter")
    N = m.N
    qs: list = []
    sectors: list = []
    tapes: list = []
    current: list = []
    tape = 0
    for pos, x in enumerate(w):
        if x.kind == Q:
            j = m.q_part_of(x.symbol) if x.part == 0 else x.part
            if x.symbol not in m.q_parts[j - 1]:
                raise NotAdmissible(pos, f"{x.symbol} is not in Q_{j}")
            if qs:
                prev = qs[-1]
                pj = prev.part
                if prev.sign > 0:
                    ok = (x.sign > 0 and j == pj % N + 1) or (x.sign < 0 and j == pj)
                else:
                    ok = (x.sign > 0 and j == pj) or (x.sign < 0 and j == (pj - 2) % N + 1)
                if not ok:
                    raise NotAdmissible(pos, "state letters violate the part order")
                sectors.append(tuple(current))
                tapes.append(tape)
                current = []
            qs.append(x if x.part == j else Letter(Q, j, x.symbol, x.sign))
            tape = j if x.sign > 0 else j - 1
            if tape == N:
                tape = 0
        elif x.kind == A:
            if x.symbol not in m.tape_parts[tape] or (x.part not in (0, tape)):
                raise NotAdmissible(pos, f"tape letter {x.symbol} not allowed in Y_{tape}")
            current.append(x if x.part == tape else aletter(tape, x.symbol, x.sign))
        else:
            raise NotAdmissible(pos, "theta-letters are not allowed")
    return Decomposition(tuple(qs), tuple(sectors), tuple(tapes))


def _apply(m: SMachine, ref: RuleRef, d: Decomposition, step: Optional[int] = None):
    parts, commuting = m.plan(ref)
    flanks = []
    new_qs = []
    for i, q in enumerate(d.qs):
        pos, neg = parts[q.part - 1]
        plan = pos if q.sign > 0 else neg
        if q.symbol != plan[0]:
            raise NotApplicable(ref, i, f"state letter {q.symbol} does not match", step)
        new_qs.append(plan[1])
        flanks.append(plan)
    cells = len(d.qs)
    new_sectors = []
    for i, s in enumerate(d.sectors):
        right_consume = flanks[i][3]
        left_consume = flanks[i + 1][2]
        middle = reduce(invert(right_consume) + s + invert(left_consume))
        allowed = commuting[d.tapes[i]]
        for x in middle:
            if x.symbol not in allowed:
                raise NotApplicable(ref, i, f"{x} does not commute with the rule", step)
        cells += len(middle)
        new_sectors.append(reduce(flanks[i][5] + middle + flanks[i + 1][4]))
    first, last = flanks[0], flanks[-1]
    left = invert(first[2]) + (tletter(first[6], ref.name, ref.sign),) + first[4]
    right = last[3] + (tletter(last[7], ref.name, ref.sign),) + invert(last[5])
    return Decomposition(tuple(new_qs), tuple(new_sectors), d.tapes), cells, left, right


def apply_rule(ref: RuleRef, w: Sequence[Letter], m: SMachine) -> Tuple[Word, int]:
    """Return ``(ref . w, cells)`` where ``cells`` is the area of the
    height-one trapezium: one cell per state letter plus one per tape letter
    that commutes past the rule."""
    d = check_admissible(w, m)
    nd, cells, _, _ = _apply(m, ref, d)
    return nd.word(), cells


def enumerate_applicable(w: Sequence[Letter], m: SMachine, length_preserving: bool = False) -> List[RuleRef]:
    d = check_admissible(w, m)
    size = len(d.word())
    out = []
    for ref in m.refs():
        try:
            nd, _, _, _ = _apply(m, ref, d)
        except NotApplicable:
            continue
        if length_preserving and len(nd.word()) != size:
            continue
        out.append(ref)
    return out


# -- computations -----------------------------------------------------------

@dataclass(frozen=True)
class Computation:
    machine: SMachine = field(repr=False)
    start: Word
    history: Tuple[RuleRef, ...]
    words: Tuple[Word, ...]
    step_cells: Tuple[int, ...]
    left_side: Word = ()
    right_side: Word = ()

    @property
    def end(self) -> Word:
        return self.words[-1]

    def __len__(self) -> int:
        return len(self.history)


def run_history(
    w: Sequence[Letter],
    h: Iterable[RuleRef],
    m: SMachine,
    budget: int = DEFAULT_BUDGET,
) -> Computation:
    h = tuple(h)
    if not is_reduced_history(h):
        raise SMachineError("history is not a reduced word")
    if len(h) > budget:
        raise BudgetExceeded(f"history of length {len(h)} exceeds the step budget {budget}")
    d = check_admissible(w, m)
    words = [d.word()]
    cells = []
    left: list = []
    right: list = []
    for step, ref in enumerate(h):
        d, c, lpiece, rpiece = _apply(m, ref, d, step)
        words.append(d.word())
        cells.append(c)
        left.extend(lpiece)
        right.extend(rpiece)
    return Computation(m, words[0], h, tuple(words), tuple(cells), reduce(left), reduce(right))


def computation_stats(c: Computation) -> Tuple[int, int, int]:
    """``(length, width, area)``."""
    return len(c.history), max(len(x) for x in c.words), sum(c.step_cells)


def remove_loops(c: Computation) -> Computation:
    """Cut out subcomputations between repeated words while the junction
    stays reduced (rules ``theta_i`` and ``theta_{j+1}`` not mutually inverse)."""
    while True:
        words, hist = c.words, c.history
        t = len(hist)
        spots: Dict[Word, List[int]] = {}
        for idx, x in enumerate(words):
            spots.setdefault(x, []).append(idx)
        cut = None
        for i in range(1, t):
            for j in reversed(spots[words[i]]):
                if i < j < t and hist[i - 1] != hist[j].inverse():
                    cut = (i, j)
                    break
            if cut:
                break
        if cut is None:
            return c
        i, j = cut
        c = run_history(c.start, hist[:i] + hist[j:], c.machine)


def a_count(w: Iterable[Letter]) -> int:
    return count_kind(w, A)

"""The adding machine Z(A): a binary counter on an n-letter tape."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

from .machine import (
    Rule,
    RulePart,
    RuleRef,
    SMachine,
    SMachineError,
    enumerate_applicable,
    run_history,
)
from .words import A, Letter, Word, aletter, qletter

L_SYM = "L"
R_SYM = "R"
P_SYMS = ("p(1)", "p(2)", "p(3)")


def zero(b: str) -> str:
    return b + "0"


def one(b: str) -> str:
    return b + "1"


def base_letter(symbol: str) -> str:
    if not symbol or symbol[-1] not in "01":
        raise ValueError(f"{symbol!r} is not a counter letter")
    return symbol[:-1]


def _a(part: int, sym: str, sign: int = 1) -> Letter:
    return aletter(part, sym, sign)


def _part(index, v, k, u, v2, k2, u2) -> RulePart:
    return RulePart(index, tuple(v), k, tuple(u), tuple(v2), k2, tuple(u2))


def z_rules(alphabet: Sequence[str]) -> List[Rule]:
    """Positive rules of Z(A) on parts 1 (L), 2 (p), 3 (R)."""
    alphabet = list(alphabet)
    y1 = frozenset(s for b in alphabet for s in (zero(b), one(b)))
    y2 = frozenset(zero(b) for b in alphabet)
    none = frozenset()
    L, R = L_SYM, R_SYM
    p1, p2, p3 = P_SYMS
    fixed_L = _part(1, (), L, (), (), L, ())
    fixed_R = _part(3, (), R, (), (), R, ())
    default = (none, y1, y2, none)
    rules = []
    for b in alphabet:
        rules.append(Rule(f"r1({b})", (fixed_L, _part(2, (), p1, (), (_a(1, one(b), -1),), p1, (_a(2, zero(b)),)), fixed_R), default))
    for b in alphabet:
        rules.append(Rule(f"r12({b})", (fixed_L, _part(2, (), p1, (), (_a(1, zero(b), -1), _a(1, one(b))), p2, ()), fixed_R), default))
    for b in alphabet:
        rules.append(Rule(f"r2({b})", (fixed_L, _part(2, (), p2, (), (_a(1, zero(b)),), p2, (_a(2, zero(b), -1),)), fixed_R), default))
    rules.append(Rule("r21", (fixed_L, _part(2, (), p2, (), (), p1, ()), fixed_R), (none, y1, none, none)))
    rules.append(Rule("r13", (fixed_L, _part(2, (), p1, (), (), p3, ()), fixed_R), (none, none, y2, none)))
    for b in alphabet:
        rules.append(Rule(f"r3({b})", (fixed_L, _part(2, (), p3, (), (_a(1, zero(b)),), p3, (_a(2, zero(b), -1),)), fixed_R), (none, y2, y2, none)))
    return rules


@lru_cache(maxsize=64)
def _build(alphabet: Tuple[str, ...]) -> SMachine:
    y1 = frozenset(s for b in alphabet for s in (zero(b), one(b)))
    y2 = frozenset(zero(b) for b in alphabet)
    return SMachine(
        name="Z(" + ",".join(alphabet) + ")",
        q_parts=(frozenset({L_SYM}), frozenset(P_SYMS), frozenset({R_SYM})),
        tape_parts=(frozenset(), y1, y2, frozenset()),
        rules=tuple(z_rules(alphabet)),
        stop_word=(qletter(1, L_SYM), qletter(2, P_SYMS[2]), qletter(3, R_SYM)),
    )


def build_zmachine(alphabet: Iterable[str]) -> SMachine:
    alphabet = tuple(alphabet)
    if not alphabet:
        raise ValueError("the alphabet must be non-empty")
    if len(set(alphabet)) != len(alphabet):
        raise ValueError("alphabet letters must be distinct")
    return _build(alphabet)


def binary_value(u: Iterable[Letter]) -> int:
    """Counter value of a tape word, most significant letter first."""
    value = 0
    for x in u:
        if x.sign < 0:
            raise ValueError("binary_value needs a positive word")
        digit = x.symbol[-1]
        if digit not in "01":
            raise ValueError(f"{x.symbol!r} is not a counter letter")
        value = 2 * value + int(digit)
    return value


def _letters(u: Iterable) -> List[str]:
    """Base letters of a tape word given as letters or plain strings."""
    out = []
    for x in u:
        if isinstance(x, Letter):
            if x.sign < 0:
                raise ValueError("tape words must be positive")
            out.append(base_letter(x.symbol))
        else:
            out.append(x)
    return out


def tape_word(letters: Sequence[str], bits: Sequence[int] = None, part: int = 1) -> Word:
    bits = bits if bits is not None else [0] * len(letters)
    return tuple(aletter(part, b + str(d)) for b, d in zip(letters, bits))


def z_word(letters: Sequence[str], bits: Sequence[int] = None, state: int = 1) -> Word:
    """``L u p(state) R`` with the tape spelled by ``letters`` and ``bits``."""
    return (qletter(1, L_SYM),) + tape_word(letters, bits) + (qletter(2, P_SYMS[state - 1]), qletter(3, R_SYM))


def canonical_cycle_history(u: Iterable, k: int) -> List[RuleRef]:
    b = _letters(u)
    n = len(b)
    if not 0 <= k < n:
        raise ValueError(f"k={k} out of range for a tape of length {n}")
    tail = b[n - k:]
    h = [RuleRef(f"r1({x})") for x in reversed(tail)]
    h.append(RuleRef(f"r12({b[n - k - 1]})"))
    h.extend(RuleRef(f"r2({x})") for x in tail)
    h.append(RuleRef("r21"))
    return h


def trailing_ones(c: int) -> int:
    return (~c & (c + 1)).bit_length() - 1


def full_count_length(n: int) -> int:
    return sum((2 * k + 2) * 2 ** (n - k - 1) for k in range(n)) + 2 * n + 1


def full_count_history(u: Iterable) -> List[RuleRef]:
    """All increments from the zero tape up to the all-ones tape, then the
    closing sweep that parks the head in state p(3) at the right end."""
    b = _letters(u)
    n = len(b)
    if n == 0:
        raise ValueError("full_count_history needs a non-empty tape")
    h: List[RuleRef] = []
    for c in range(2 ** n - 1):
        h.extend(canonical_cycle_history(b, trailing_ones(c)))
    h.extend(_closing_sweep(tuple(b)))
    if len(h) != full_count_length(n):
        raise SMachineError(f"full count has length {len(h)}, expected {full_count_length(n)}")
    return h


@lru_cache(maxsize=256)
def _closing_sweep(b: Tuple[str, ...]) -> Tuple[RuleRef, ...]:
    m = build_zmachine(tuple(dict.fromkeys(b)))
    n = len(b)
    w = z_word(b, [1] * n, 1)
    target = z_word(b, [0] * n, 3)
    last = RuleRef("r21")
    sweep = []
    while w != target:
        options = [r for r in enumerate_applicable(w, m, length_preserving=True) if r != last.inverse()]
        if len(options) != 1:
            raise SMachineError(f"closing sweep is not deterministic at {len(sweep)} steps: {options}")
        last = options[0]
        sweep.append(last)
        w = run_history(w, [last], m).end
        if len(sweep) > 2 * n + 1:
            raise SMachineError("closing sweep overran")
    return tuple(sweep)


def cycle_boundaries(n: int) -> List[int]:
    """Step indices at which each increment cycle ends."""
    out, t = [], 0
    for c in range(2 ** n - 1):
        t += 2 * trailing_ones(c) + 2
        out.append(t)
    return out


def tape_of(w: Sequence[Letter]) -> Word:
    """Tape letters of an ``L u p v R`` word, read left to right."""
    return tuple(x for x in w if x.kind == A)

"""Composition S∘Z, the pumping machine, and HNN presentations."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Sequence, Tuple

from .adding import L_SYM, P_SYMS, R_SYM, full_count_history, z_rules
from .machine import (
    Computation,
    DEFAULT_BUDGET,
    Rule,
    RulePart,
    RuleRef,
    SMachine,
    SMachineError,
    check_admissible,
    run_history,
)
from .words import A, Letter, Word, aletter, qletter, split_token

PUMP_LETTER = "a"


def pump_machine() -> SMachine:
    """Two-part machine whose rules each push one tape letter into the
    sector between ``k1`` and ``k2``."""
    y = frozenset({PUMP_LETTER})
    none = frozenset()
    rules = []
    for name in ("eta0", "eta1"):
        rules.append(
            Rule(
                name,
                (
                    RulePart(1, (), "k1", (), (), "k1", ()),
                    RulePart(2, (), "k2", (), (aletter(1, PUMP_LETTER),), "k2", ()),
                ),
                (none, y, none),
            )
        )
    return SMachine(
        name="pump",
        q_parts=(frozenset({"k1"}), frozenset({"k2"})),
        tape_parts=(none, y, none),
        rules=tuple(rules),
        stop_word=(qletter(1, "k1"), qletter(2, "k2")),
    )


def pump_word(m: int) -> Word:
    return (qletter(1, "k1"),) + tuple(aletter(1, PUMP_LETTER) for _ in range(m)) + (qletter(2, "k2"),)


def pump_history(m: int) -> List[RuleRef]:
    return [RuleRef("eta0")] * m + [RuleRef("eta1", -1)] * m


# -- composition ------------------------------------------------------------

def p_plain(i: int) -> str:
    return f"p{i}"


def p_state(i: int, theta: str, j: int) -> str:
    return f"p{i}({theta},{j})"


def bar_name(theta: str) -> str:
    return f"bar({theta})"


def zeta_name(theta: str) -> str:
    return f"zeta({theta})"


def zbar_name(i: int, theta: str, rule: str) -> str:
    return f"zbar({i},{theta},{rule})"


def _lift(w: Word, part: int, digit: str = "0") -> Word:
    return tuple(aletter(part, x.symbol + digit, x.sign) for x in w)


def _tape_sets(S: SMachine) -> Tuple[List[frozenset], List[frozenset]]:
    zero = [frozenset(y + "0" for y in S.tape_parts[i]) for i in range(S.N + 1)]
    both = [frozenset(s for y in S.tape_parts[i] for s in (y + "0", y + "1")) for i in range(S.N + 1)]
    return zero, both


def _relabel(p: RulePart, index: int, rename: Dict[str, str], shift: int) -> RulePart:
    def move(w):
        return tuple(aletter(x.part + shift, x.symbol, x.sign) for x in w)

    return RulePart(index, move(p.v), rename[p.k], move(p.u), move(p.v2), rename[p.k2], move(p.u2))


def compose(S: SMachine) -> SMachine:
    N = S.N
    if N < 2:
        raise SMachineError("composition needs at least two Q-parts")
    for r in S.rules:
        for p in r.parts:
            for x in p.v + p.u + p.v2 + p.u2:
                if x.symbol[-1:] in ("0", "1"):
                    raise SMachineError(f"tape symbol {x.symbol!r} must not end in a binary digit")
    thetas = [r.name for r in S.rules]
    zero, both = _tape_sets(S)
    none = frozenset()

    q_parts: List[frozenset] = []
    for i in range(1, N + 1):
        q_parts.append(S.q_parts[i - 1])
        if i < N:
            q_parts.append(frozenset([p_plain(i)] + [p_state(i, t, j) for t in thetas for j in (1, 2, 3)]))
    M = 2 * N - 1
    tape_parts = [none] * (M + 1)
    for i in range(1, N):
        tape_parts[2 * i - 1] = both[i]
        tape_parts[2 * i] = zero[i]

    def idle_commuting() -> List[frozenset]:
        c = [none] * (M + 1)
        for s in range(1, N):
            c[2 * s - 1] = zero[s]
        return c

    rules: List[Rule] = []
    for r in S.rules:
        parts: List[RulePart] = []
        for i in range(1, N + 1):
            src = r.parts[i - 1]
            parts.append(RulePart(2 * i - 1, (), src.k, _lift(src.u, 2 * i - 1), (), src.k2, _lift(src.u2, 2 * i - 1)))
            if i < N:
                nxt = r.parts[i]
                parts.append(
                    RulePart(2 * i, _lift(nxt.v, 2 * i - 1), p_plain(i), (), _lift(nxt.v2, 2 * i - 1), p_state(i, r.name, 1), ())
                )
        commuting = [none] * (M + 1)
        for i in range(1, N):
            commuting[2 * i - 1] = frozenset(y + "0" for y in r.commuting[i])
        rules.append(Rule(bar_name(r.name), tuple(parts), tuple(commuting)))

    for r in S.rules:
        out_states = [p.k2 for p in r.parts]
        for i in range(1, N):
            alphabet = sorted(S.tape_parts[i])
            rename = {L_SYM: out_states[i - 1], R_SYM: out_states[i]}
            for j, sym in enumerate(P_SYMS, start=1):
                rename[sym] = p_state(i, r.name, j)
            for zr in z_rules(alphabet):
                parts = []
                for s in range(1, N + 1):
                    k = out_states[s - 1]
                    if s == i:
                        parts.append(_relabel(zr.parts[0], 2 * s - 1, rename, 2 * i - 2))
                        parts.append(_relabel(zr.parts[1], 2 * s, rename, 2 * i - 2))
                    elif s == i + 1:
                        parts.append(_relabel(zr.parts[2], 2 * s - 1, rename, 2 * i - 2))
                        if s < N:
                            p = p_state(s, r.name, 1)
                            parts.append(RulePart(2 * s, (), p, (), (), p, ()))
                    else:
                        parts.append(RulePart(2 * s - 1, (), k, (), (), k, ()))
                        if s < N:
                            p = p_state(s, r.name, 3 if s < i else 1)
                            parts.append(RulePart(2 * s, (), p, (), (), p, ()))
                commuting = idle_commuting()
                commuting[2 * i - 1] = zr.commuting[1]
                commuting[2 * i] = zr.commuting[2]
                rules.append(Rule(zbar_name(i, r.name, zr.name), tuple(parts), tuple(commuting)))

    for r in S.rules:
        parts = []
        for i in range(1, N + 1):
            k = r.parts[i - 1].k2
            parts.append(RulePart(2 * i - 1, (), k, (), (), k, ()))
            if i < N:
                parts.append(RulePart(2 * i, (), p_state(i, r.name, 3), (), (), p_plain(i), ()))
        rules.append(Rule(zeta_name(r.name), tuple(parts), tuple(idle_commuting())))

    composed = SMachine(
        name=f"{S.name}∘Z",
        q_parts=tuple(q_parts),
        tape_parts=tuple(tape_parts),
        rules=tuple(rules),
    )
    if S.stop_word:
        composed = replace(composed, stop_word=lift_word(S.stop_word, S))
    return composed


def lift_word(w: Sequence[Letter], S: SMachine) -> Word:
    """Insert ``p_i`` after every ``k_i`` (i < N) and rename tape letters
    ``y`` to ``y0``. Only positive bases are supported."""
    d = check_admissible(w, S)
    out: list = []
    for q, sector in d.pairs():
        if q.sign < 0:
            raise SMachineError("lift_word supports positive bases only")
        j = q.part
        out.append(qletter(2 * j - 1, q.symbol))
        if sector is not None:
            if j == S.N:
                raise SMachineError("lift_word does not support wrapping bases")
            out.extend(_lift(sector, 2 * j - 1))
            out.append(qletter(2 * j, p_plain(j)))
    return tuple(out)


def project_word(w: Sequence[Letter]) -> Word:
    """Drop p-letters and index-1 tape letters, strip the index from the rest."""
    out = []
    for x in w:
        if x.kind == A:
            if x.symbol.endswith("1"):
                continue
            out.append(aletter((x.part + 1) // 2, x.symbol[:-1], x.sign))
        elif x.part % 2 == 0:
            continue
        else:
            out.append(qletter((x.part + 1) // 2, x.symbol, x.sign))
    return tuple(out)


def _count_phase(word: Word, i: int, theta: str) -> List[RuleRef]:
    tape = [x for x in word if x.kind == A and x.part == 2 * i - 1]
    if any(x.sign < 0 or not x.symbol.endswith("0") for x in tape):
        raise SMachineError(f"sector {i} is not a zero tape")
    if not tape:
        return [RuleRef(zbar_name(i, theta, "r13"))]
    return [RuleRef(zbar_name(i, theta, r.name)) for r in full_count_history(tape)]


@dataclass(frozen=True)
class ComposedRun:
    computation: Computation
    checkpoints: Tuple[int, ...]


def composed_history(base: Computation, S: SMachine) -> Tuple[List[RuleRef], List[int]]:
    """Composed history and the indices of composed words matching base words."""
    N = S.N
    h: List[RuleRef] = []
    checkpoints = [0]
    for step, ref in enumerate(base.history):
        theta = ref.name
        if ref.sign > 0:
            after = base.words[step + 1]
            tapes = lift_word(after, S)
            h.append(RuleRef(bar_name(theta)))
            for i in range(1, N):
                h.extend(_count_phase(tapes, i, theta))
            h.append(RuleRef(zeta_name(theta)))
        else:
            before = lift_word(base.words[step], S)
            h.append(RuleRef(zeta_name(theta), -1))
            for i in range(N - 1, 0, -1):
                h.extend(r.inverse() for r in reversed(_count_phase(before, i, theta)))
            h.append(RuleRef(bar_name(theta), -1))
        checkpoints.append(len(h))
    return h, checkpoints


def simulate_composed(base: Computation, composed: SMachine = None, budget: int = DEFAULT_BUDGET) -> ComposedRun:
    S = base.machine
    composed = composed or compose(S)
    h, checkpoints = composed_history(base, S)
    c = run_history(lift_word(base.start, S), h, composed, budget=budget)
    for idx, t in enumerate(checkpoints):
        if project_word(c.words[t]) != base.words[idx]:
            raise SMachineError(f"composed word at step {t} does not project to base word {idx}")
    return ComposedRun(c, tuple(checkpoints))


def composed_length(n: int) -> int:
    """Length of the simulated pump computation with ``m = n``."""
    return 2 ** (n + 4) - 16 - 2 * n


# -- presentations ----------------------------------------------------------

Token = Tuple[str, int]


@dataclass(frozen=True)
class Relation:
    left: Tuple[Token, ...]
    right: Tuple[Token, ...]


@dataclass(frozen=True)
class Presentation:
    q_generators: Tuple[str, ...]
    a_generators: Tuple[str, ...]
    theta_generators: Tuple[str, ...]
    relations: Tuple[Relation, ...]
    qtheta_count: int
    atheta_count: int

    @property
    def free_rank(self) -> int:
        return len(self.q_generators) + len(self.a_generators)

    @property
    def stable_letters(self) -> int:
        return len({t.rsplit("@", 1)[0] for t in self.theta_generators})


def _tokens(w: Word) -> Tuple[Token, ...]:
    return tuple((x.symbol, x.sign) for x in w)


def emit_presentation(m: SMachine) -> Presentation:
    N = m.N
    qs = tuple(s for qp in m.q_parts for s in sorted(qp))
    as_ = tuple(dict.fromkeys(s for tp in m.tape_parts for s in sorted(tp)))
    thetas = tuple(f"{r.name}@{i}" for r in m.rules for i in range(1, N + 1))
    rels = []
    qcount = acount = 0
    for r in m.rules:
        for p in r.parts:
            i = p.index
            left = _tokens(p.v) + ((p.k, 1),) + _tokens(p.u) + ((f"{r.name}@{i % N + 1}", 1),)
            right = ((f"{r.name}@{i}", 1),) + _tokens(p.v2) + ((p.k2, 1),) + _tokens(p.u2)
            rels.append(Relation(left, right))
            qcount += 1
        for j in range(1, N):
            for a in sorted(r.commuting[j]):
                t = (f"{r.name}@{j + 1}", 1)
                rels.append(Relation((t, (a, 1)), ((a, 1), t)))
                acount += 1
    return Presentation(qs, as_, thetas, tuple(rels), qcount, acount)


def _fmt_side(side: Sequence[Token]) -> str:
    return " * ".join(s if e > 0 else s + "^-1" for s, e in side)


def dump_presentation(p: Presentation) -> str:
    lines = [
        "presentation v1",
        f"q-generators: {' '.join(p.q_generators)}",
        f"a-generators: {' '.join(p.a_generators)}",
        f"theta-generators: {' '.join(p.theta_generators)}",
        f"free-rank: {p.free_rank}",
        f"stable-letters: {p.stable_letters}",
        f"qtheta-relations: {p.qtheta_count}",
        f"atheta-relations: {p.atheta_count}",
    ]
    for r in p.relations:
        lines.append(f"{_fmt_side(r.left)} = {_fmt_side(r.right)}")
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> Presentation:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "presentation v1":
        raise ValueError("line 1: expected 'presentation v1'")
    header: Dict[str, str] = {}
    rels = []
    for no, ln in enumerate(lines[1:], start=2):
        if " = " in ln:
            left, right = ln.split(" = ")
            side = lambda s: tuple(split_token(t.strip()) for t in s.split("*"))
            rels.append(Relation(side(left), side(right)))
        elif ":" in ln:
            key, _, val = ln.partition(":")
            header[key.strip()] = val.strip()
        else:
            raise ValueError(f"line {no}: cannot parse {ln!r}")
    try:
        p = Presentation(
            tuple(header["q-generators"].split()),
            tuple(header["a-generators"].split()),
            tuple(header["theta-generators"].split()),
            tuple(rels),
            int(header["qtheta-relations"]),
            int(header["atheta-relations"]),
        )
    except KeyError as e:
        raise ValueError(f"missing header {e.args[0]!r}") from None
    if p.qtheta_count + p.atheta_count != len(rels):
        raise ValueError("relation count does not match the header")
    if int(header.get("free-rank", p.free_rank)) != p.free_rank:
        raise ValueError("free-rank does not match the generators")
    return p

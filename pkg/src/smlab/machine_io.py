"""Text format for S-machines.

    smachine v1
    name: Z(a)
    parts: 3
    q 1: L
    q 2: p(1) p(2) p(3)
    y 1: a0 a1
    rule r21: [L -> L, p(2) ->l p(1), R -> R]
    rule r3(a): [L -> L, p(3) -> a0 p(3) a0^-1, R -> R] Y1={a0}
    stop: L p(3) R

``->l`` marks a part whose right tape commutes with nothing; a ``Yi={..}``
suffix gives any other non-default commuting set.
"""

from __future__ import annotations

import re
from typing import Dict, List, Tuple

from .machine import Rule, RulePart, SMachine, SMachineError, check_admissible
from .words import Word, aletter, qletter, split_token

HEADER = "smachine v1"


class MachineParseError(SMachineError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _tok(sym: str, sign: int) -> str:
    return sym if sign > 0 else sym + "^-1"


def _word_text(w: Word) -> List[str]:
    return [_tok(x.symbol, x.sign) for x in w]


def _part_text(p: RulePart, marked: bool) -> str:
    left = _word_text(p.v) + [p.k] + _word_text(p.u)
    right = _word_text(p.v2) + [p.k2] + _word_text(p.u2)
    arrow = "->l" if marked else "->"
    return f"{' '.join(left)} {arrow} {' '.join(right)}"


def dump_machine(m: SMachine) -> str:
    N = m.N
    lines = [HEADER, f"name: {m.name}", f"parts: {N}"]
    for i, qp in enumerate(m.q_parts, start=1):
        lines.append(f"q {i}: {' '.join(sorted(qp))}")
    for t in range(1, N):
        lines.append(f"y {t}: {' '.join(sorted(m.tape_parts[t]))}")
    for r in m.rules:
        texts = []
        extra = []
        for p in r.parts:
            t = p.index
            c = r.commuting[t] if t < N else frozenset()
            full = m.tape_parts[t] if t < N else frozenset()
            marked = bool(full) and not c
            texts.append(_part_text(p, marked))
            if c and c != full:
                extra.append(f"Y{t}={{{' '.join(sorted(c))}}}")
        line = f"rule {r.name}: [{', '.join(texts)}]"
        if extra:
            line += " " + " ".join(extra)
        lines.append(line)
    if m.stop_word:
        lines.append(f"stop: {' '.join(_word_text(m.stop_word))}")
    return "\n".join(lines) + "\n"


def split_top_level(text: str, sep: str = ",") -> List[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced parentheses")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError("unbalanced parentheses")
    out.append("".join(cur))
    return out


RULE_LINE = re.compile(r"^rule (.+?): \[(.*)\]((?: Y[0-9]+=\{[^}]*\})*)$")
OVERRIDE = re.compile(r"Y([0-9]+)=\{([^}]*)\}")


def parse_machine(text: str) -> SMachine:
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise MachineParseError(1, f"expected header {HEADER!r}")
    name = ""
    N = None
    q: Dict[int, frozenset] = {}
    y: Dict[int, frozenset] = {}
    rule_lines: List[Tuple[int, str]] = []
    stop_text = None
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("rule "):
            rule_lines.append((no, line))
            continue
        key, sep, val = line.partition(":")
        if not sep:
            raise MachineParseError(no, f"cannot parse {line!r}")
        key, val = key.strip(), val.strip()
        words = key.split()
        if key == "name":
            name = val
        elif key == "parts":
            if not val.isdigit() or int(val) < 1:
                raise MachineParseError(no, "parts must be a positive integer")
            N = int(val)
        elif len(words) == 2 and words[0] in ("q", "y") and words[1].isdigit():
            target = q if words[0] == "q" else y
            target[int(words[1])] = frozenset(val.split())
        elif key == "stop":
            stop_text = (no, val)
        else:
            raise MachineParseError(no, f"unknown key {key!r}")
    if N is None:
        raise MachineParseError(len(lines), "missing 'parts'")
    if sorted(q) != list(range(1, N + 1)):
        raise MachineParseError(len(lines), f"expected q lines for parts 1..{N}")
    if any(t < 1 or t >= N for t in y):
        raise MachineParseError(len(lines), f"y lines must index tapes 1..{N - 1}")
    tapes = tuple([frozenset()] + [y.get(t, frozenset()) for t in range(1, N)] + [frozenset()])
    qparts = tuple(q[i] for i in range(1, N + 1))
    rules = [_parse_rule(no, line, N, qparts, tapes) for no, line in rule_lines]
    stop: Word = ()
    try:
        m = SMachine(name, qparts, tapes, tuple(rules))
        if stop_text is not None:
            stop = parse_word(stop_text[1], m)
            m = SMachine(name, qparts, tapes, tuple(rules), stop)
    except SMachineError as e:
        raise MachineParseError(stop_text[0] if stop_text else len(lines), str(e)) from None
    return m


def _parse_rule(no: int, line: str, N: int, qparts, tapes) -> Rule:
    m = RULE_LINE.match(line)
    if not m:
        raise MachineParseError(no, "malformed rule line")
    name, body, tail = m.group(1), m.group(2), m.group(3)
    try:
        chunks = split_top_level(body)
    except ValueError as e:
        raise MachineParseError(no, str(e)) from None
    if len(chunks) != N:
        raise MachineParseError(no, f"rule {name} has {len(chunks)} parts, expected {N}")
    commuting = [frozenset()] + [tapes[t] for t in range(1, N)] + [frozenset()]
    parts = []
    for i, chunk in enumerate(chunks, start=1):
        toks = chunk.split()
        arrows = [k for k, t in enumerate(toks) if t in ("->", "->l")]
        if len(arrows) != 1:
            raise MachineParseError(no, f"part {i} of rule {name} needs one arrow")
        a = arrows[0]
        if toks[a] == "->l":
            if i >= N:
                raise MachineParseError(no, f"part {i} has no tape to mark")
            commuting[i] = frozenset()
        v, k, u = _split_side(no, toks[:a], i, qparts[i - 1])
        v2, k2, u2 = _split_side(no, toks[a + 1:], i, qparts[i - 1])
        parts.append(RulePart(i, v, k, u, v2, k2, u2))
    for t, syms in OVERRIDE.findall(tail):
        t = int(t)
        if not 1 <= t < N:
            raise MachineParseError(no, f"Y{t} is not a tape part")
        commuting[t] = frozenset(syms.split())
    return Rule(name, tuple(parts), tuple(commuting))


def _split_side(no: int, toks: List[str], i: int, qpart: frozenset):
    states = [k for k, t in enumerate(toks) if split_token(t)[0] in qpart]
    if len(states) != 1:
        raise MachineParseError(no, f"part {i} side {' '.join(toks)!r} needs exactly one state letter of Q_{i}")
    s = states[0]
    sym, sign = split_token(toks[s])
    if sign < 0:
        raise MachineParseError(no, "state letters in rules must be positive")
    v = tuple(aletter(i - 1, *split_token(t)) for t in toks[:s])
    u = tuple(aletter(i, *split_token(t)) for t in toks[s + 1:])
    return v, sym, u


def parse_word(text: str, m: SMachine) -> Word:
    """Parse an admissible word; tape letters take their part from the
    sector they sit in."""
    raw = []
    for tok in text.split():
        sym, sign = split_token(tok)
        try:
            raw.append(qletter(m.q_part_of(sym), sym, sign))
        except SMachineError:
            raw.append(aletter(0, sym, sign))
    return check_admissible(raw, m).word()


def load_machine(path) -> SMachine:
    with open(path, encoding="utf-8") as fh:
        return parse_machine(fh.read())

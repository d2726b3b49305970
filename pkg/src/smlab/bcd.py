"""Bipartite chord diagrams and their alpha-dispersion."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

BOUNDARY = None
TOKEN = re.compile(r"^[TQ][0-9]+$")


class BCDError(ValueError):
    pass


class BCDParseError(BCDError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Node(NamedTuple):
    t: str
    q: str


def chord_class(c: str) -> str:
    return c[0]


@dataclass(frozen=True)
class WeightProfile:
    alpha: Tuple[Fraction, ...]

    def __post_init__(self):
        alpha = tuple(Fraction(a) for a in self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if not alpha:
            raise ValueError("alpha must be non-empty")
        if alpha[0] <= 0 or alpha[-1] != 1 or any(x > y for x, y in zip(alpha, alpha[1:])):
            raise ValueError("alpha must satisfy 0 < a1 <= ... <= aK = 1")

    @classmethod
    def linear(cls, K: int) -> "WeightProfile":
        if K < 1:
            raise ValueError("K must be positive")
        return cls(tuple(Fraction(i, K) for i in range(1, K + 1)))

    @property
    def K(self) -> int:
        return len(self.alpha)

    def weight(self, count: int) -> Fraction:
        return self.alpha[min(self.K, count) - 1]


ONE = WeightProfile.linear(1)


@dataclass(frozen=True)
class BCD:
    """Chord endpoints in counterclockwise order; ``T*`` and ``Q*`` tokens."""

    boundary: Tuple[str, ...]
    _ends: Dict[str, Tuple[int, int]] = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)
    _nodes: Dict[str, Tuple[str, ...]] = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "boundary", tuple(self.boundary))
        seen: Dict[str, List[int]] = {}
        for i, tok in enumerate(self.boundary):
            if not TOKEN.match(tok):
                raise BCDError(f"bad chord token {tok!r}")
            seen.setdefault(tok, []).append(i)
        for tok, pos in seen.items():
            if len(pos) != 2:
                raise BCDError(f"chord {tok} appears {len(pos)} times")
            self._ends[tok] = (pos[0], pos[1])
        self._validate()

    def _validate(self) -> None:
        for cls in "TQ":
            stack: List[str] = []
            for tok in self.boundary:
                if tok[0] != cls:
                    continue
                if stack and stack[-1] == tok:
                    stack.pop()
                elif tok in stack:
                    raise BCDError(f"two {cls}-chords cross ({tok} and {stack[-1]})")
                else:
                    stack.append(tok)

    @property
    def size(self) -> int:
        return len(self.boundary)

    def chords(self, cls: Optional[str] = None) -> List[str]:
        return [c for c in self._ends if cls is None or c[0] == cls]

    def ends(self, c: str) -> Tuple[int, int]:
        try:
            return self._ends[c]
        except KeyError:
            raise BCDError(f"unknown chord {c!r}") from None

    def crossing(self, c: str) -> Tuple[str, ...]:
        """Chords crossing ``c`` in order along ``c`` from its first endpoint."""
        got = self._nodes.get(c)
        if got is None:
            self._fill_nodes()
            got = self._nodes.get(c)
            if got is None:
                self.ends(c)
        return got

    def _fill_nodes(self) -> None:
        # scan the arcs of the smaller class, then order the other class by position
        ts, qs = self.chords("T"), self.chords("Q")
        small, large = (ts, qs) if len(ts) <= len(qs) else (qs, ts)
        hits: Dict[str, List[Tuple[int, str]]] = {c: [] for c in large}
        for c in small:
            i, j = self._ends[c]
            found = []
            for pos in range(i + 1, j):
                tok = self.boundary[pos]
                if tok[0] != c[0]:
                    a, b = self._ends[tok]
                    if a < i or b > j:
                        found.append(tok)
            self._nodes[c] = tuple(found)
            for tok in found:
                a, b = self._ends[tok]
                inner = i if a < i < b else j
                hits[tok].append((inner, c))
        for c in large:
            self._nodes[c] = tuple(name for _, name in sorted(hits[c]))


def crosses(d: BCD, c1: str, c2: str) -> bool:
    i1, j1 = d.ends(c1)
    i2, j2 = d.ends(c2)
    return (i1 < i2 < j1) != (i1 < j2 < j1)


def nodes_on(d: BCD, c: str, from_endpoint: int) -> List[Node]:
    i, j = d.ends(c)
    if from_endpoint not in (i, j):
        raise BCDError(f"position {from_endpoint} is not an endpoint of {c}")
    order = d.crossing(c)
    if from_endpoint == j:
        order = tuple(reversed(order))
    if c[0] == "T":
        return [Node(c, x) for x in order]
    return [Node(x, c) for x in order]


def _in_arc(x: int, start: int, end: int, n: int) -> bool:
    """``x`` lies strictly inside the counterclockwise arc from start to end."""
    return 0 < (x - start) % n < (end - start) % n


def _left_end(d: BCD, t: str, tail: int, head: int) -> int:
    a, b = d.ends(t)
    return a if _in_arc(a, head, tail, d.size) else b


def node_weight(d: BCD, o: Node, left_end: int, p: WeightProfile = ONE) -> Fraction:
    """``left_end`` is the endpoint of the T-chord regarded as its left end."""
    nodes = nodes_on(d, o.t, left_end)
    return p.weight(nodes.index(o) + 1)


def left_neighbour(d: BCD, o: Node, left_end: int) -> Optional[str]:
    """Q-chord of the nearest node left of ``o`` on its T-chord, or BOUNDARY."""
    nodes = nodes_on(d, o.t, left_end)
    k = nodes.index(o)
    return BOUNDARY if k == 0 else nodes[k - 1].q


def _orientation(d: BCD, o1: Node, o2: Node) -> Tuple[int, int]:
    if o1.q != o2.q:
        raise BCDError("nodes lie on different Q-chords")
    if o1 == o2:
        raise BCDError("a pair needs two distinct nodes")
    i, j = d.ends(o1.q)
    order = d.crossing(o1.q)
    if order.index(o1.t) < order.index(o2.t):
        return i, j
    return j, i


def classify_pair(d: BCD, o1: Node, o2: Node) -> str:
    tail, head = _orientation(d, o1, o2)
    n1 = left_neighbour(d, o1, _left_end(d, o1.t, tail, head))
    n2 = left_neighbour(d, o2, _left_end(d, o2.t, tail, head))
    return "good" if n1 == n2 else "bad"


def pair_weight(d: BCD, o1: Node, o2: Node, p: WeightProfile = ONE) -> Fraction:
    tail, head = _orientation(d, o1, o2)
    return node_weight(d, o1, _left_end(d, o1.t, tail, head), p) * node_weight(d, o2, _left_end(d, o2.t, tail, head), p)


def dispersion_brute(d: BCD, p: WeightProfile = ONE) -> Fraction:
    """Direct sum over ordered node pairs; quadratic per chord."""
    total = Fraction(0)
    for c in d.chords("Q"):
        nodes = [Node(t, c) for t in d.crossing(c)]
        for o1 in nodes:
            for o2 in nodes:
                if o1 != o2 and classify_pair(d, o1, o2) == "bad":
                    total += pair_weight(d, o1, o2, p)
    return total


def _scaled(p: WeightProfile) -> Tuple[List[int], int]:
    scale = 1
    for a in p.alpha:
        scale = lcm(scale, a.denominator)
    return [int(a * scale) for a in p.alpha], scale


def chord_dispersion(d: BCD, p: WeightProfile = ONE) -> Dict[str, Fraction]:
    """Dispersion of every Q-chord.

    For a fixed orientation of a Q-chord every node has one weight and one
    left neighbour, so the bad-pair sum is all pairs minus pairs sharing a
    neighbour class, each obtained from power sums.
    """
    weights, scale = _scaled(p)
    K = len(weights)
    n = d.size
    out: Dict[str, Fraction] = {}
    for c in d.chords("Q"):
        i, j = d.ends(c)
        order = d.crossing(c)
        total = 0
        for tail, head, seq in ((i, j, order), (j, i, tuple(reversed(order)))):
            all_sum = all_sq = 0
            groups: Dict[Optional[str], List[int]] = {}
            for t in seq:
                ta, tb = d.ends(t)
                left = ta if _in_arc(ta, head, tail, n) else tb
                along = d.crossing(t)
                k = along.index(c)
                if left == ta:
                    neighbour = along[k - 1] if k else BOUNDARY
                else:
                    neighbour = along[k + 1] if k < len(along) - 1 else BOUNDARY
                    k = len(along) - 1 - k
                w = weights[min(K, k + 1) - 1]
                all_sum, all_sq = all_sum + w, all_sq + w * w
                g = groups.setdefault(neighbour, [0, 0])
                g[0] += w
                g[1] += w * w
            pairs = all_sum * all_sum - all_sq
            same = sum(s * s - sq for s, sq in groups.values())
            total += (pairs - same) // 2
        out[c] = Fraction(total, scale * scale)
    return out


def dispersion(d: BCD, p: WeightProfile = ONE) -> Fraction:
    return sum(chord_dispersion(d, p).values(), Fraction(0))


def delete_chord(d: BCD, c: str) -> BCD:
    d.ends(c)
    return BCD(tuple(x for x in d.boundary if x != c))


def is_close(d: BCD, c_prime: str, c: str) -> bool:
    """Every chord crossing ``c_prime`` also crosses ``c``."""
    if c_prime[0] != "Q" or c[0] != "Q":
        raise BCDError("closeness is defined for Q-chords")
    return set(d.crossing(c_prime)) <= set(d.crossing(c))


def half_disc_counts(d: BCD, c_prime: str, c: str) -> Dict[str, int]:
    """Per T-chord, nodes on Q-chords lying in the side of ``c`` that holds
    ``c_prime`` (``c`` itself included)."""
    i, j = d.ends(c)
    a, _ = d.ends(c_prime)
    inside = (lambda x: i < x < j) if i < a < j else (lambda x: x < i or x > j)
    qs = {c} | {q for q in d.chords("Q") if q != c and inside(d.ends(q)[0])}
    return {t: sum(1 for q in d.crossing(t) if q in qs) for t in d.chords("T")}


def grid(h: int, b: int) -> BCD:
    """``h`` T-chords each crossing all ``b`` Q-chords."""
    bottom = [f"Q{j}" for j in range(1, b + 1)]
    right = [f"T{i}" for i in range(1, h + 1)]
    return BCD(tuple(bottom + right + bottom[::-1] + right[::-1]))


# -- random generation ------------------------------------------------------

def _noncrossing(rng: random.Random, count: int) -> List[int]:
    """Random noncrossing perfect matching on ``2*count`` points as chord ids."""
    labels = [0] * (2 * count)
    next_id = [0]

    def fill(lo: int, hi: int) -> None:
        # points lo..hi-1, even count
        while hi > lo:
            k = rng.randrange((hi - lo) // 2)
            partner = lo + 2 * k + 1
            next_id[0] += 1
            labels[lo] = labels[partner] = next_id[0]
            fill(lo + 1, partner)
            lo = partner + 1

    fill(0, 2 * count)
    return labels


def random_bcd(seed, t_count: int, q_count: int) -> BCD:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    ts = [f"T{x}" for x in _noncrossing(rng, t_count)]
    qs = [f"Q{x}" for x in _noncrossing(rng, q_count)]
    size = 2 * (t_count + q_count)
    t_slots = set(rng.sample(range(size), 2 * t_count))
    ti = iter(ts)
    qi = iter(qs)
    return BCD(tuple(next(ti) if k in t_slots else next(qi) for k in range(size)))


def noncrossing_matchings(count: int) -> Iterable[Tuple[int, ...]]:
    if count == 0:
        yield ()
        return

    def rec(points: Tuple[int, ...]):
        if not points:
            yield {}
            return
        first = points[0]
        for k in range(1, len(points), 2):
            inner, outer = points[1:k], points[k + 1:]
            for a in rec(inner):
                for b in rec(outer):
                    m = {first: points[k], points[k]: first}
                    m.update(a)
                    m.update(b)
                    yield m

    for m in rec(tuple(range(2 * count))):
        ids: Dict[int, int] = {}
        labels = []
        for x in range(2 * count):
            key = min(x, m[x])
            ids.setdefault(key, len(ids) + 1)
            labels.append(ids[key])
        yield tuple(labels)


def all_bcds(t_count: int, q_count: int) -> Iterable[BCD]:
    """Every diagram with the given counts, up to chord naming."""
    from itertools import combinations

    size = 2 * (t_count + q_count)
    tms = list(noncrossing_matchings(t_count))
    qms = list(noncrossing_matchings(q_count))
    for slots in combinations(range(size), 2 * t_count):
        slot_set = set(slots)
        for tm in tms:
            for qm in qms:
                ti, qi = iter(tm), iter(qm)
                yield BCD(tuple(f"T{next(ti)}" if k in slot_set else f"Q{next(qi)}" for k in range(size)))


# -- file format ------------------------------------------------------------

EMPTY = "-"


def dump_bcd(d: BCD, K: Optional[int] = None) -> str:
    lines = ["bcd v1"]
    if K is not None:
        lines.append(f"K {K}")
    lines.append(" ".join(d.boundary) or EMPTY)
    return "\n".join(lines) + "\n"


def parse_bcd(text: str) -> Tuple[BCD, Optional[int]]:
    lines = text.splitlines()
    content = [(no, ln) for no, ln in enumerate(lines, start=1) if ln.strip()]
    if not content or content[0][1].strip() != "bcd v1":
        raise BCDParseError(content[0][0] if content else 1, 1, "expected header 'bcd v1'")
    rest = content[1:]
    K = None
    if rest and rest[0][1].split()[0] == "K":
        no, ln = rest[0]
        parts = ln.split()
        if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
            raise BCDParseError(no, ln.index("K") + 1, "expected 'K <positive int>'")
        K = int(parts[1])
        rest = rest[1:]
    if len(rest) != 1:
        raise BCDParseError(rest[1][0] if len(rest) > 1 else len(lines) + 1, 1, "expected exactly one boundary line")
    no, ln = rest[0]
    if ln.strip() == EMPTY:
        return BCD(()), K
    tokens = []
    counts: Dict[str, int] = {}
    for m in re.finditer(r"\S+", ln):
        tok = m.group()
        if not TOKEN.match(tok):
            raise BCDParseError(no, m.start() + 1, f"bad token {tok!r}")
        counts[tok] = counts.get(tok, 0) + 1
        if counts[tok] > 2:
            raise BCDParseError(no, m.start() + 1, f"chord {tok} appears more than twice")
        tokens.append(tok)
    for tok, k in counts.items():
        if k != 2:
            raise BCDParseError(no, ln.index(tok) + 1, f"chord {tok} appears only once")
    try:
        return BCD(tuple(tokens)), K
    except BCDError as e:
        raise BCDParseError(no, 1, str(e)) from None

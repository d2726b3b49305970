"""Typed free-group letters, words, projections and the modified length."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Tuple

Q = "Q"
A = "A"
THETA = "T"


class Letter(NamedTuple):
    """A signed generator.

    ``part`` is the Q-part index for state letters, the tape-part index of the
    sector the letter sits in for tape letters, and the brother index for
    theta-letters (whose ``symbol`` is then the rule name).
    """

    kind: str
    part: int
    symbol: str
    sign: int = 1

    def inverse(self) -> "Letter":
        return Letter(self.kind, self.part, self.symbol, -self.sign)

    def __str__(self) -> str:
        return format_letter(self)


Word = Tuple[Letter, ...]


def qletter(part: int, symbol: str, sign: int = 1) -> Letter:
    return Letter(Q, part, symbol, sign)


def aletter(part: int, symbol: str, sign: int = 1) -> Letter:
    return Letter(A, part, symbol, sign)


def tletter(brother: int, rule: str, sign: int = 1) -> Letter:
    return Letter(THETA, brother, rule, sign)


def is_inverse_pair(x: Letter, y: Letter) -> bool:
    return x.sign == -y.sign and x.symbol == y.symbol and x.kind == y.kind and x.part == y.part


def reduce(w: Iterable[Letter]) -> Word:
    out: list = []
    for x in w:
        if out and is_inverse_pair(out[-1], x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(w: Sequence[Letter]) -> bool:
    return all(not is_inverse_pair(w[i], w[i + 1]) for i in range(len(w) - 1))


def invert(w: Sequence[Letter]) -> Word:
    return tuple(x.inverse() for x in reversed(w))


def project_base(w: Iterable[Letter]) -> Word:
    return tuple(x for x in w if x.kind == Q)


def project_history(w: Iterable[Letter]) -> Tuple[Tuple[str, int], ...]:
    """Brothers collapse to their rule; no reduction is performed."""
    return tuple((x.symbol, x.sign) for x in w if x.kind == THETA)


def count_kind(w: Iterable[Letter], kind: str) -> int:
    return sum(1 for x in w if x.kind == kind)


# -- textual form -----------------------------------------------------------

def format_letter(x: Letter) -> str:
    text = x.symbol if x.kind != THETA else f"{x.symbol}@{x.part}"
    return text if x.sign > 0 else text + "^-1"


def format_word(w: Iterable[Letter]) -> str:
    return " ".join(format_letter(x) for x in w)


def split_token(token: str) -> Tuple[str, int]:
    if token.endswith("^-1"):
        return token[:-3], -1
    return token, 1


# -- modified length --------------------------------------------------------

@dataclass(frozen=True)
class LengthProfile:
    """Parameters of the modified length: max relation length ``L``, the
    tape-letter weight ``delta`` and the base-size constant ``K``."""

    L: int
    delta: Fraction
    K: int = 1

    def __post_init__(self):
        if self.L < 1 or self.K < 1:
            raise ValueError("L and K must be positive")
        if not isinstance(self.delta, Fraction):
            object.__setattr__(self, "delta", Fraction(self.delta))
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if not 2 - 4 * self.L * self.delta - self.L * self.K * self.delta > self.delta:
            raise ValueError(f"delta={self.delta} violates 2-4L*delta-LK*delta > delta for L={self.L}, K={self.K}")

    @classmethod
    def default(cls, L: int, K: int = 1) -> "LengthProfile":
        return cls(L, Fraction(1, 4 * L + L * K + 1), K)


def modified_length(w: Sequence[Letter], profile: LengthProfile) -> Fraction:
    """Cheapest decomposition into letters and (theta,a)-syllables.

    q-letters cost 1, bare a-letters cost ``delta``; a syllable (at most ``L``
    letters, exactly one theta-letter, no q-letters) costs 1.
    """
    if not is_reduced(w):
        raise ValueError("modified_length needs a freely reduced word")
    n = len(w)
    L = profile.L
    best = [Fraction(0)] * (n + 1)
    for i in range(1, n + 1):
        x = w[i - 1]
        if x.kind == Q:
            cand = best[i - 1] + 1
        elif x.kind == A:
            cand = best[i - 1] + profile.delta
        else:
            cand = best[i - 1] + 1
        # syllables ending at position i
        thetas = 0
        for j in range(i - 1, max(i - L, 0) - 1, -1):
            y = w[j]
            if y.kind == Q:
                break
            if y.kind == THETA:
                thetas += 1
                if thetas > 1:
                    break
            if thetas == 1 and best[j] + 1 < cand:
                cand = best[j] + 1
        best[i] = cand
    return best[n]

"""The free Boolean group over a pointed set.

An element is the finite set of its non-``e`` letters; addition is symmetric
difference, so every element is its own inverse and ``e`` (index 0) is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .ground_space import GroundSpace


@dataclass(frozen=True, order=True)
class GroupElement:
    support: tuple[int, ...] = ()

    def __post_init__(self):
        s = tuple(int(i) for i in self.support)
        if any(i < 1 for i in s):
            raise ValueError("supports hold point indices >= 1 (e = 0 is the zero element)")
        if any(a >= b for a, b in zip(s, s[1:])):
            raise ValueError("support must be strictly increasing")
        object.__setattr__(self, "support", s)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "GroupElement":
        """Element with the given letters; duplicates are an error, 0 is dropped."""
        s = sorted(int(i) for i in indices if int(i) != 0)
        if len(set(s)) != len(s):
            raise ValueError("repeated letter; use sum_points for cancelling sums")
        return cls(tuple(s))

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(tuple(sorted(set(self.support) ^ set(other.support))))

    def __len__(self) -> int:
        return len(self.support)

    def __bool__(self) -> bool:
        return bool(self.support)

    def __iter__(self):
        return iter(self.support)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.support)) + "}" if self.support else "0"

    def to_mask(self) -> int:
        m = 0
        for i in self.support:
            m |= 1 << i
        return m

    @classmethod
    def from_mask(cls, mask: int) -> "GroupElement":
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return cls.of(out)


ZERO = GroupElement()


def add(g: GroupElement, h: GroupElement) -> GroupElement:
    return g + h


def word_length(g: GroupElement) -> int:
    return len(g.support)


def in_Bn(g: GroupElement, n: int) -> bool:
    return len(g.support) <= n


def sum_points(xs: Sequence[int], space: GroundSpace | None = None) -> GroupElement:
    """``x_1 + ... + x_k``: repeated letters cancel in pairs and ``e`` vanishes."""
    odd: set[int] = set()
    for x in xs:
        x = int(x)
        if space is not None and not 0 <= x < space.size:
            raise IndexError(f"point index {x} out of range")
        if x < 0:
            raise IndexError(f"point index {x} out of range")
        if x:
            odd ^= {x}
    return GroupElement(tuple(sorted(odd)))


@dataclass(frozen=True)
class Representation:
    """A sum of two-letter words ``(x_1 + y_1) + ... + (x_q + y_q)``."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs))

    @property
    def element(self) -> GroupElement:
        return sum_points([i for p in self.pairs for i in p])

    def weight(self, space: GroundSpace) -> float:
        return float(sum(space.distance(a, b) for a, b in self.pairs))

    def entries(self) -> list[int]:
        return [i for p in self.pairs for i in p]


def evaluate_representation(rep: Representation, space: GroundSpace) -> tuple[GroupElement, float]:
    for a, b in rep.pairs:
        if not (0 <= a < space.size and 0 <= b < space.size):
            raise IndexError(f"pair ({a}, {b}) out of range")
    return rep.element, rep.weight(space)


def parse_element(text: str) -> GroupElement:
    """Parse a comma-separated index list (``""`` or ``"0"`` is the zero element)."""
    text = text.strip()
    if not text:
        return ZERO
    return sum_points([int(t) for t in text.split(",") if t.strip()])

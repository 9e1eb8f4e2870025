"""Graev prenorm and pseudometric on the free Boolean group.

``graev_norm`` uses the matching form: the minimal representation of ``h``
pairs up the letters of ``h`` (plus ``e`` when there are oddly many), so the
prenorm is a minimum-weight perfect matching, solved exactly by bitmask DP.
``oracle_norm`` is an independent check that minimises over *all*
representations of bounded length, repeats and ``e`` included.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .boolean_group import ZERO, GroupElement, Representation, sum_points
from .errors import CapacityError, GuardError
from .ground_space import GroundSpace

DEFAULT_MATCH_LIMIT = 20
ORACLE_GUARD = 10**8


def match_limit() -> int:
    env = os.environ.get("GRAEV_MATCH_LIMIT")
    return int(env) if env else DEFAULT_MATCH_LIMIT


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]
    weight: float

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.pairs]


@dataclass(frozen=True)
class NormResult:
    value: float
    witness: Matching

    def to_json(self) -> dict:
        return {"value": self.value, "witness": self.witness.to_json()}


def min_perfect_matching(w: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    """Exact minimum-weight perfect matching of an even-sized complete graph.

    Bitmask DP that always matches the lowest unmatched vertex first; among
    optimal matchings the lexicographically smallest sorted pair list wins.
    """
    m = len(w)
    if m % 2:
        raise ValueError("perfect matching needs an even number of vertices")
    w = [[float(x) for x in row] for row in w]
    memo: dict[int, tuple[float, int]] = {0: (0.0, -1)}

    def solve(mask: int) -> float:
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        best, arg = math.inf, -1
        r = rest
        while r:
            low = r & -r
            j = low.bit_length() - 1
            r ^= low
            c = w[i][j] + solve(rest ^ low)
            if c < best:
                best, arg = c, j
        memo[mask] = (best, arg)
        return best

    full = (1 << m) - 1
    total = solve(full)
    pairs = []
    mask = full
    while mask:
        i = (mask & -mask).bit_length() - 1
        j = memo[mask][1]
        pairs.append((i, j))
        mask ^= (1 << i) | (1 << j)
    return total, pairs


def graev_norm(h: GroupElement, s: GroundSpace, limit: int | None = None) -> NormResult:
    """``N(h)``: minimum weight of a representation of ``h`` as a sum of two-letter words."""
    s.require_valid()
    limit = match_limit() if limit is None else limit
    pts = list(h.support)
    if pts and pts[-1] >= s.size:
        raise IndexError(f"element {h!r} uses a point outside the space")
    if len(pts) % 2:
        pts = [0] + pts
    if len(pts) > limit:
        raise CapacityError(f"matching over {len(pts)} points exceeds the limit {limit}")
    if not pts:
        return NormResult(0.0, Matching((), 0.0))
    _, local = min_perfect_matching(s.submatrix(pts))
    pairs = tuple((pts[i], pts[j]) for i, j in local)
    weight = float(sum(s.distance(a, b) for a, b in pairs))
    return NormResult(weight, Matching(pairs, weight))


def graev_dist(g: GroupElement, h: GroupElement, s: GroundSpace, limit: int | None = None) -> float:
    return graev_norm(g + h, s, limit).value


def norm_table(s: GroundSpace) -> np.ndarray:
    """Prenorm of every element of a finite space at once.

    Entry ``mask`` holds ``N`` of the element whose support has bit ``i`` set
    for each letter ``i`` (bit 0, the point e, is always clear), so the table
    has ``2**|X|`` entries with the odd masks unused.
    """
    s.require_valid()
    n = s.size
    if n > 16:
        raise GuardError("norm_table is limited to 16 points")
    d = s.matrix().tolist()
    size = 1 << n
    best = [math.inf] * size  # min perfect matching of the point set `mask`
    best[0] = 0.0
    for mask in range(1, size):
        if bin(mask).count("1") % 2:
            continue
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        r = rest
        b = math.inf
        di = d[i]
        while r:
            low = r & -r
            j = low.bit_length() - 1
            r ^= low
            c = di[j] + best[rest ^ low]
            if c < b:
                b = c
        best[mask] = b
    out = np.full(size, np.nan)
    for mask in range(0, size, 2):
        out[mask] = best[mask] if bin(mask).count("1") % 2 == 0 else best[mask | 1]
    return out


# ---------------------------------------------------------------------------
# cancellation reduction


def reduce_representation(rep: Representation, s: GroundSpace) -> Representation:
    """Cancel until all letters are pairwise distinct, never raising the weight.

    Degenerate words ``x + x`` are dropped; two words sharing a letter
    ``(z + t) + (z + u)`` become ``t + u``, which costs no more by the
    triangle inequality.
    """
    s.require_valid()
    pairs = [p for p in rep.pairs if p[0] != p[1]]
    while True:
        hit = _shared_letter(pairs)
        if hit is None:
            return Representation(tuple(pairs))
        i, j, z = hit
        t = pairs[i][1] if pairs[i][0] == z else pairs[i][0]
        u = pairs[j][1] if pairs[j][0] == z else pairs[j][0]
        del pairs[j]
        if t == u:
            del pairs[i]
        else:
            pairs[i] = (t, u)


def _shared_letter(pairs):
    seen: dict[int, int] = {}
    for j, (a, b) in enumerate(pairs):
        for x in (a, b):
            if x in seen:
                return seen[x], j, x
        seen[a] = j
        seen[b] = j
    return None


# ---------------------------------------------------------------------------
# oracle


def oracle_layers(s: GroundSpace, max_pairs: int) -> np.ndarray:
    """Bounded-length shortest paths over the whole group.

    Row ``q`` holds, for every element (as a letter mask over ``X``), the
    least weight of any sequence of at most ``q`` words ``x + y`` with
    ``x, y`` ranging over all of ``X x X`` that sums to it. This is the
    exhaustive minimum over representations with at most ``q`` pairs: the
    sum of a word list depends only on its multiset, and each step below
    tries every possible next word.
    """
    n = s.size
    if (1 << n) * n * n * max(max_pairs, 1) > ORACLE_GUARD:
        raise GuardError("oracle search space exceeds the guard")
    d = s.matrix()
    size = 1 << n
    idx = np.arange(size)
    layers = np.full((max_pairs + 1, size), np.inf)
    layers[0, 0] = 0.0
    words = []
    for x in range(n):
        for y in range(n):
            # e (bit 0) is the zero element: clear it from every word.
            words.append((((1 << x) ^ (1 << y)) & ~1, d[x, y]))
    for q in range(1, max_pairs + 1):
        prev = layers[q - 1]
        cur = prev.copy()
        for mask, wt in words:
            np.minimum(cur, prev[idx ^ mask] + wt, out=cur)
        layers[q] = cur
    return layers


def oracle_norm(h: GroupElement, s: GroundSpace, max_pairs: int) -> float:
    """Least weight over every representation of ``h`` with at most ``max_pairs`` words."""
    if h.support and h.support[-1] >= s.size:
        raise IndexError("element uses a point outside the space")
    value = oracle_layers(s, max_pairs)[max_pairs, h.to_mask()]
    return float(value)


def brute_force_norm(h: GroupElement, s: GroundSpace, max_pairs: int, guard: int = 10**6) -> float:
    """Literal enumeration of all word lists of length ``<= max_pairs``; tiny cases only."""
    words = [(x, y) for x in range(s.size) for y in range(x, s.size)]
    if sum(len(words) ** q for q in range(max_pairs + 1)) > guard:
        raise GuardError("enumeration exceeds the guard")
    best = 0.0 if not h.support else math.inf
    for q in range(1, max_pairs + 1):
        for combo in product(words, repeat=q):
            if sum_points([i for p in combo for i in p]) == h:
                best = min(best, sum(s.distance(a, b) for a, b in combo))
    return best


def required_pairs(h: GroupElement) -> int:
    """Length of a reduced representation: ceil(|h| / 2)."""
    return (len(h) + 1) // 2


def oracle_budget(h: GroupElement, slack: int = 2) -> int:
    return math.ceil((len(h) + 1) / 2) + slack


def check_matching(h: GroupElement, m: Matching) -> list[str]:
    """Problems with ``m`` as a witness for ``h`` (empty list when valid)."""
    problems = []
    letters = [i for p in m.pairs for i in p]
    if len(set(letters)) != len(letters):
        problems.append("a letter is used twice")
    if sorted(i for i in letters if i) != list(h.support):
        problems.append("pairs do not partition the support")
    uses_e = 0 in letters
    if uses_e != (len(h) % 2 == 1):
        problems.append("e must be used exactly when the support is odd")
    if m.weight < 0:
        problems.append("negative weight")
    return problems


__all__ = [
    "Matching", "NormResult", "ZERO", "graev_norm", "graev_dist", "norm_table",
    "reduce_representation", "oracle_norm", "oracle_layers", "brute_force_norm",
    "min_perfect_matching", "check_matching", "oracle_budget", "required_pairs",
]

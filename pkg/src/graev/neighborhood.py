"""Neighborhoods ``W_D`` of zero built from a sequence of pseudometrics.

``W_n`` is the set of words ``x + y`` with ``d_n(x, y) < 1`` (plus zero), and
``W_D`` is the union of the sums ``W_1 + ... + W_n``. Membership is certified
by a witness assigning each word of a representation its own index ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import count
from typing import Iterator

import numpy as np
from scipy.optimize import linear_sum_assignment

from .boolean_group import GroupElement, sum_points
from .errors import BallConditionError, GuardError
from .graev_metric import graev_norm
from .ground_space import GroundSpace, PseudometricSequence

THRESHOLD = 1.0
REFUTER_GUARD = 10**8
MATCHING_ENUM_GUARD = 10**5


@dataclass(frozen=True)
class WdWitness:
    pairs: tuple[tuple[int, int, int], ...] = ()  # (x, y, n)

    @property
    def element(self) -> GroupElement:
        return sum_points([i for x, y, _ in self.pairs for i in (x, y)])

    @property
    def max_index(self) -> int:
        return max((n for *_, n in self.pairs), default=0)

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.pairs]


@dataclass(frozen=True)
class WdVerdict:
    status: str  # "certified" | "refuted" | "unknown"
    n_max: int
    witness: WdWitness | None = None
    method: str = ""

    def to_json(self) -> dict:
        out = {"verdict": self.status, "n_max": self.n_max, "method": self.method}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def in_W(seq: PseudometricSequence, n: int, x: int, y: int) -> bool:
    return x == y or seq.metric(n)[x, y] < THRESHOLD


def check_witness(g: GroupElement, w: WdWitness, seq: PseudometricSequence, buckets: bool = False) -> list[str]:
    """Independent validity check of a ``W_D`` witness; returns the list of problems.

    With ``buckets=True`` also check that dyadic bucket ``j`` (indices in
    ``[2^j, 2^(j+1))``) holds fewer than ``2^j`` words.
    """
    problems = []
    idx = [n for *_, n in w.pairs]
    if any(n < 1 for n in idx):
        problems.append("indices must be positive")
    if len(set(idx)) != len(idx):
        problems.append("indices are not distinct")
    for x, y, n in w.pairs:
        if n >= 1 and not (x == y or seq.metric(n)[x, y] < THRESHOLD):
            problems.append(f"d_{n}({x},{y}) = {seq.metric(n)[x, y]:g} is not below 1")
    if w.element != g:
        problems.append(f"pairs sum to {w.element!r}, not {g!r}")
    if buckets:
        per: dict[int, int] = {}
        for n in idx:
            if n >= 1:
                per[n.bit_length() - 1] = per.get(n.bit_length() - 1, 0) + 1
        for j, c in per.items():
            if c >= 2**j:
                problems.append(f"bucket {j} holds {c} >= 2^{j} words")
    return problems


# ---------------------------------------------------------------------------
# membership


def _perfect_matchings(items: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    a = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1:]
        for m in _perfect_matchings(rest):
            yield [(a, items[k])] + m


def certify_reduced(g: GroupElement, seq: PseudometricSequence, n_max: int) -> WdWitness | None:
    """Sound certifier: try every reduced representation of ``g``.

    For each perfect matching of the letters (``e`` adjoined when odd) solve
    the assignment of words to distinct indices ``<= n_max``. ``None`` means
    no reduced witness exists, which does not refute membership.
    """
    pts = list(g.support)
    if len(pts) % 2:
        pts = [0] + pts
    q = len(pts) // 2
    if q == 0:
        return WdWitness()
    if q > n_max:
        return None
    if math.prod(range(len(pts) - 1, 0, -2)) > MATCHING_ENUM_GUARD:
        raise GuardError("too many reduced representations to enumerate")
    tables = [seq.metric(n) for n in range(1, n_max + 1)]
    for m in _perfect_matchings(pts):
        cost = np.array([[0.0 if t[x, y] < THRESHOLD else 1.0 for t in tables] for x, y in m])
        rows, cols = linear_sum_assignment(cost)
        if cost[rows, cols].sum() == 0:
            pairs = sorted(((m[r][0], m[r][1], int(c) + 1) for r, c in zip(rows, cols)), key=lambda p: p[2])
            return WdWitness(tuple(pairs))
    return None


def refute_bounded(g: GroupElement, seq: PseudometricSequence, n_max: int) -> WdWitness | None:
    """Exact search of ``W_1 + ... + W_{n_max}``.

    Layer ``n`` holds every group element reachable with one optional word
    from each of ``W_1..W_n``; representations may repeat letters and use
    ``e``. Returns a witness, or ``None`` when ``g`` is provably outside.
    """
    N = seq.n_points
    size = 1 << N
    if size * N * N * n_max > REFUTER_GUARD:
        raise GuardError("bounded search exceeds the guard")
    target = g.to_mask()
    idx = np.arange(size)
    reach = np.zeros(size, dtype=bool)
    reach[0] = True
    parents = []  # per layer: word id (-1 = no new word) for newly reached states
    words_per_layer = []
    for n in range(1, n_max + 1):
        t = seq.metric(n)
        xs, ys = np.nonzero(np.triu(t < THRESHOLD, k=1))
        words = [(int(x), int(y), ((1 << int(x)) ^ (1 << int(y))) & ~1) for x, y in zip(xs, ys)]
        nxt = reach.copy()
        parent = np.full(size, -1)
        for k, (_, _, mask) in enumerate(words):
            hit = reach[idx ^ mask] & ~nxt
            parent[hit] = k
            nxt |= hit
        reach = nxt
        parents.append(parent)
        words_per_layer.append(words)
    if not reach[target]:
        return None
    pairs = []
    state = target
    for n in range(n_max, 0, -1):
        k = parents[n - 1][state]
        if k >= 0:
            x, y, mask = words_per_layer[n - 1][k]
            pairs.append((x, y, n))
            state ^= mask
    assert state == 0
    return WdWitness(tuple(reversed(pairs)))


def wd_membership(g: GroupElement, seq: PseudometricSequence, n_max: int) -> WdVerdict:
    """Three-valued membership of ``g`` in ``W_1 + ... + W_{n_max}``.

    ``certified`` carries a checkable witness; ``refuted`` means exhaustive
    bounded search found none; ``unknown`` means the search was too large.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if not g.support:
        return WdVerdict("certified", n_max, WdWitness(), "zero")
    if g.support[-1] >= seq.n_points:
        raise IndexError("element uses a point outside the space")
    try:
        w = certify_reduced(g, seq, n_max)
    except GuardError:
        w = None
    if w is not None:
        return WdVerdict("certified", n_max, w, "reduced")
    try:
        w = refute_bounded(g, seq, n_max)
    except GuardError:
        return WdVerdict("unknown", n_max, None, "guard")
    if w is None:
        return WdVerdict("refuted", n_max, None, "exhaustive")
    return WdVerdict("certified", n_max, w, "exhaustive")


# ---------------------------------------------------------------------------
# constructive ball inclusion


def dyadic_level(r: float) -> int:
    """The ``k >= 1`` with ``2^-(k+1) <= r < 2^-k`` (requires ``0 < r < 1/2``)."""
    if not 0 < r < 0.5:
        raise ValueError("dyadic level needs 0 < r < 1/2")
    k = max(1, int(math.floor(-math.log2(r))))
    while r >= math.ldexp(1.0, -k):
        k -= 1
    while r < math.ldexp(1.0, -k - 1):
        k += 1
    return k


@dataclass
class BallWitness:
    witness: WdWitness
    levels: list[int] = field(default_factory=list)  # k_i per word, in witness order
    norm: float = 0.0


def wd_witness_from_ball(g: GroupElement, seq: PseudometricSequence, rho: GroundSpace) -> WdWitness:
    """Witness of ``g in W_D`` for ``g`` in the ball ``N_rho(g) < 1/2``.

    ``rho`` must be ``combine_sup(seq)``. Each word ``x + y`` of the optimal
    matching gets a level ``k`` with ``2^-(k+1) <= rho(x, y) < 2^-k``
    (zero-weight words take the smallest level keeping ``sum 2^-k < 1``);
    the words of level ``j`` go to indices ``2^j + 1, 2^j + 2, ...``.
    """
    return ball_witness(g, seq, rho).witness


def ball_witness(g: GroupElement, seq: PseudometricSequence, rho: GroundSpace) -> BallWitness:
    res = graev_norm(g, rho)
    if not res.value < 0.5:
        raise BallConditionError(f"N(g) = {res.value:g} is not below 1/2")
    words = list(res.witness.pairs)
    levels: list[int | None] = []
    total = 0.0
    for x, y in words:
        r = rho.distance(x, y)
        if r > 0:
            k = dyadic_level(r)
            levels.append(k)
            total += math.ldexp(1.0, -k)
        else:
            levels.append(None)
    for i, k in enumerate(levels):
        if k is None:
            k = next(k for k in count(1) if total + math.ldexp(1.0, -k) < 1.0)
            levels[i] = k
            total += math.ldexp(1.0, -k)
    assert total < 1.0
    used: dict[int, int] = {}
    pairs = []
    for (x, y), j in zip(words, levels):
        used[j] = used.get(j, 0) + 1
        assert used[j] < 2**j, "dyadic bucket overflow"
        pairs.append((x, y, 2**j + used[j]))
    order = sorted(range(len(pairs)), key=lambda i: pairs[i][2])
    return BallWitness(WdWitness(tuple(pairs[i] for i in order)), [levels[i] for i in order], res.value)


def ball_membership(g: GroupElement, s: GroundSpace, r: float) -> bool:
    return graev_norm(g, s).value < r

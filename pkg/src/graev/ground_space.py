"""Finite pseudometric ground spaces with a distinguished point ``e`` at index 0.

Two kinds are supported: ``matrix`` (an explicit distance table) and
``euclidean`` (a point cloud, optionally confined to an open box so that
incomplete spaces such as the open interval can be modelled).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidSpaceError, StructuralError

TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    axiom: str  # "diagonal" | "symmetry" | "triangle"
    indices: tuple[int, ...]
    detail: str

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "indices": list(self.indices), "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.ok, "violations": [v.to_json() for v in self.violations]}


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GroundSpace:
    """A pseudometric space ``(X, rho)``; index 0 is the distinguished point ``e``.

    Build instances through :meth:`from_matrix` or :meth:`euclidean`.
    ``domain`` (euclidean only) is an open box ``((lo, hi), ...)`` with one
    interval per coordinate; ``None`` means the whole of R^d.
    """

    kind: str
    labels: tuple[str, ...]
    dist: np.ndarray | None = None
    coords: np.ndarray | None = None
    domain: tuple[tuple[float, float], ...] | None = None
    _check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self._check:
            _check_structure(self)

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_matrix(cls, dist, labels: Sequence[str] | None = None) -> "GroundSpace":
        arr = np.asarray(dist, dtype=float)
        n = arr.shape[0] if arr.ndim >= 1 else 0
        return cls("matrix", _labels(labels, n), dist=_readonly(arr))

    @classmethod
    def euclidean(cls, coords, labels: Sequence[str] | None = None, domain=None) -> "GroundSpace":
        arr = np.asarray(coords, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if domain is not None:
            domain = tuple((float(lo), float(hi)) for lo, hi in domain)
        return cls("euclidean", _labels(labels, arr.shape[0]), coords=_readonly(arr), domain=domain)

    # -- basic queries --------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def distance(self, i: int, j: int) -> float:
        n = self.size
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"point index out of range: ({i}, {j}) for |X| = {n}")
        if i == j:
            return 0.0
        if self.kind == "matrix":
            return float(self.dist[i, j])
        return float(math.dist(self.coords[i], self.coords[j]))

    def submatrix(self, idx: Sequence[int]) -> np.ndarray:
        """Distance table restricted to the points ``idx`` (in that order)."""
        idx = np.asarray(idx, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= self.size):
            raise IndexError("point index out of range")
        if self.kind == "matrix":
            return self.dist[np.ix_(idx, idx)]
        pts = self.coords[idx]
        diff = pts[:, None, :] - pts[None, :, :]
        out = np.sqrt((diff * diff).sum(axis=-1))
        np.fill_diagonal(out, 0.0)
        return out

    def matrix(self) -> np.ndarray:
        if self.kind == "matrix":
            return self.dist
        return self.submatrix(range(self.size))

    def in_domain(self, point) -> bool:
        if self.domain is None:
            return True
        p = np.atleast_1d(np.asarray(point, dtype=float))
        return all(lo < x < hi for x, (lo, hi) in zip(p, self.domain))

    def gap_to_complement(self, point) -> float:
        """Distance from ``point`` to the complement of the open domain (inf for R^d)."""
        if self.domain is None:
            return math.inf
        p = np.atleast_1d(np.asarray(point, dtype=float))
        if not self.in_domain(p):
            return 0.0
        return float(min(min(x - lo, hi - x) for x, (lo, hi) in zip(p, self.domain)))

    def with_points(self, new_coords, new_labels: Sequence[str] | None = None) -> "GroundSpace":
        """Return a euclidean space with ``new_coords`` appended (new indices at the end)."""
        if self.kind != "euclidean":
            raise StructuralError("only euclidean spaces can grow")
        new = np.atleast_2d(np.asarray(new_coords, dtype=float))
        if new.size == 0:
            return self
        if new_labels is None:
            new_labels = [f"x{self.size + k}" for k in range(len(new))]
        return GroundSpace.euclidean(
            np.vstack([self.coords, new]), list(self.labels) + list(new_labels), self.domain
        )

    def scaled(self, c: float) -> "GroundSpace":
        return GroundSpace.from_matrix(c * self.matrix(), self.labels)

    # -- validation -----------------------------------------------------

    @cached_property
    def report(self) -> ValidationReport:
        return validate_space(self)

    def require_valid(self) -> None:
        if not self.report.ok:
            v = self.report.violations[0]
            raise InvalidSpaceError(
                f"not a pseudometric space ({len(self.report.violations)} violations), first: {v.detail}"
            )

    # -- serialisation --------------------------------------------------

    def to_json(self) -> dict:
        out = {"kind": self.kind, "labels": list(self.labels)}
        if self.kind == "matrix":
            out["dist"] = self.dist.tolist()
        else:
            out["coords"] = self.coords.tolist()
            if self.domain is not None:
                out["domain"] = [list(b) for b in self.domain]
        return out


def _labels(labels, n: int) -> tuple[str, ...]:
    if labels is None:
        return ("e",) + tuple(f"x{i}" for i in range(1, n))
    return tuple(str(s) for s in labels)


def _check_structure(s: GroundSpace) -> None:
    if s.kind == "matrix":
        d = s.dist
        if d is None or d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise StructuralError("distance table must be square")
        n = d.shape[0]
        if not np.all(np.isfinite(d)):
            raise StructuralError("distance table has non-finite entries")
        if np.any(d < 0):
            i, j = map(int, np.argwhere(d < 0)[0])
            raise StructuralError(f"negative distance at ({i}, {j})")
    elif s.kind == "euclidean":
        c = s.coords
        if c is None or c.ndim != 2:
            raise StructuralError("coordinates must be a list of equal-length vectors")
        n = c.shape[0]
        if not np.all(np.isfinite(c)):
            raise StructuralError("coordinates must be finite")
        if s.domain is not None and len(s.domain) != c.shape[1]:
            raise StructuralError("domain needs one interval per coordinate")
    else:
        raise StructuralError(f"unknown space kind {s.kind!r}")
    if n < 1:
        raise StructuralError("a ground space needs at least the point e")
    if len(s.labels) != n:
        raise StructuralError("label count does not match point count")


def validate_space(s: GroundSpace, tol: float = TOL) -> ValidationReport:
    """List every pseudometric-axiom violation of ``s`` with witnessing indices."""
    out: list[Violation] = []
    if s.kind == "euclidean":
        # Euclidean distance is a metric; only the domain can be violated.
        for i, p in enumerate(s.coords):
            if not s.in_domain(p):
                out.append(Violation("domain", (i,), f"point {i} lies outside the open domain"))
        return ValidationReport(tuple(out))
    d = s.dist
    for i in np.flatnonzero(np.abs(np.diag(d)) > tol):
        out.append(Violation("diagonal", (int(i),), f"dist({i},{i}) = {d[i, i]} != 0"))
    for i, j in np.argwhere(np.abs(d - d.T) > tol):
        if i < j:
            out.append(Violation("symmetry", (int(i), int(j)), f"dist({i},{j}) = {d[i, j]} != dist({j},{i}) = {d[j, i]}"))
    # excess[i, j, k] = d(i,k) - d(i,j) - d(j,k)
    excess = d[:, None, :] - d[:, :, None] - d[None, :, :]
    for i, j, k in np.argwhere(excess > tol):
        if i < k and j != i and j != k:
            out.append(Violation(
                "triangle", (int(i), int(j), int(k)),
                f"triangle fails at ({i},{k}) via {j}: {d[i, k]:g} > {d[i, j]:g}+{d[j, k]:g}",
            ))
    return ValidationReport(tuple(out))


def distance(s: GroundSpace, i: int, j: int) -> float:
    return s.distance(i, j)


def metric_closure(d) -> np.ndarray:
    """Shortest-path closure of a symmetric non-negative table (Floyd-Warshall).

    Zero entries are kept as zero-length edges, which ``scipy.sparse.csgraph``
    would read as missing edges.
    """
    d = np.array(d, dtype=float)
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    for k in range(d.shape[0]):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    return d


# ---------------------------------------------------------------------------
# sequences of pseudometrics


TAIL_RULES = ("repeat-last", "scale", "zero")


@dataclass(frozen=True, eq=False)
class PseudometricSequence:
    """Finitely described sequence ``d_1, d_2, ...`` over one point set.

    ``tail`` fixes ``d_n`` for ``n > L``: ``repeat-last`` (d_n = d_L),
    ``scale`` (d_n = ratio**(n-L) * d_L) or ``zero``.
    """

    metrics: tuple[np.ndarray, ...]
    tail: str = "repeat-last"
    ratio: float = 1.0

    def __post_init__(self):
        if not self.metrics:
            raise StructuralError("a pseudometric sequence needs at least one metric")
        if self.tail not in TAIL_RULES:
            raise StructuralError(f"unknown tail rule {self.tail!r}")
        if self.tail == "scale" and not (self.ratio >= 0 and math.isfinite(self.ratio)):
            raise StructuralError("scale ratio must be finite and non-negative")
        shape = self.metrics[0].shape
        for m in self.metrics:
            if m.shape != shape:
                raise StructuralError("all metrics must share one point set")
            if not np.all(np.isfinite(m)):
                raise StructuralError("metric tables must be finite (no NaN/inf)")

    @classmethod
    def of(cls, metrics, tail: str = "repeat-last", ratio: float = 1.0) -> "PseudometricSequence":
        return cls(tuple(_readonly(m) for m in metrics), tail, float(ratio))

    @property
    def length(self) -> int:
        return len(self.metrics)

    @property
    def n_points(self) -> int:
        return self.metrics[0].shape[0]

    def metric(self, n: int) -> np.ndarray:
        """The table of ``d_n`` (1-based)."""
        if n < 1:
            raise IndexError("pseudometric indices start at 1")
        L = self.length
        if n <= L:
            return self.metrics[n - 1]
        last = self.metrics[-1]
        if self.tail == "repeat-last":
            return last
        if self.tail == "zero":
            return np.zeros_like(last)
        return self.ratio ** (n - L) * last

    def partial_sum(self, count: int) -> np.ndarray:
        """``d_1 + ... + d_count`` in closed form (``count`` may be huge)."""
        L = self.length
        head = sum(self.metrics[: min(count, L)])
        extra = count - L
        if extra <= 0:
            return np.array(head, dtype=float)
        last = self.metrics[-1]
        if self.tail == "zero":
            return np.array(head, dtype=float)
        if self.tail == "repeat-last":
            return head + float(extra) * last
        r = self.ratio
        if r == 1.0:
            factor = float(extra)
        elif r < 1.0:
            factor = r * (1.0 - r**extra) / (1.0 - r)
        else:
            with np.errstate(over="ignore"):
                factor = r * math.expm1(min(extra * math.log(r), 700.0)) / (r - 1.0)
        return head + factor * last

    def tail_limit(self) -> np.ndarray:
        """Pointwise ``sum_{i>=1} d_i`` (inf where it diverges)."""
        head = np.array(sum(self.metrics), dtype=float)
        last = self.metrics[-1]
        if self.tail == "zero" or (self.tail == "scale" and self.ratio == 0):
            return head
        if self.tail == "scale" and self.ratio < 1:
            return head + self.ratio / (1 - self.ratio) * last
        out = head.copy()
        out[last > 0] = math.inf
        return out

    def bound_sum(self, n: int) -> np.ndarray:
        """``p_n = d_1 + ... + d_{2^(n+1)}``."""
        return self.partial_sum(2 ** (n + 1))


def combine_sup(seq: PseudometricSequence, labels: Sequence[str] | None = None) -> GroundSpace:
    """``rho = sup_n 2^-n * min(1, p_n)`` with ``p_n = d_1 + ... + d_{2^(n+1)}``.

    Whenever ``rho(x, y) < 2^-n`` we get ``p_n(x, y) < 1``.
    """
    N = seq.n_points
    rho = np.zeros((N, N))
    cap = np.minimum(1.0, seq.tail_limit())  # bounds min(1, p_n) for every n
    active = np.ones((N, N), dtype=bool)
    np.fill_diagonal(active, False)
    n = 1
    while active.any() and n <= 1100:
        term = 2.0**-n * np.minimum(1.0, seq.bound_sum(n))
        rho = np.where(active, np.maximum(rho, term), rho)
        # later terms are at most 2^-(n+1) * cap
        active &= 2.0 ** -(n + 1) * cap > rho
        n += 1
    rho = np.maximum(rho, rho.T)
    np.fill_diagonal(rho, 0.0)
    return GroundSpace.from_matrix(rho, labels)


# ---------------------------------------------------------------------------
# JSON I/O


def space_from_json(obj: dict) -> GroundSpace:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise StructuralError("space file must be an object with a 'kind' field")
    kind = obj["kind"]
    labels = obj.get("labels")
    if kind == "matrix":
        if "dist" not in obj:
            raise StructuralError("matrix space needs 'dist'")
        rows = obj["dist"]
        if not rows or any(len(r) != len(rows) for r in rows):
            raise StructuralError("distance table must be square")
        s = GroundSpace.from_matrix(rows, labels)
    elif kind == "euclidean":
        if "coords" not in obj:
            raise StructuralError("euclidean space needs 'coords'")
        coords = obj["coords"]
        if not coords or len({len(np.atleast_1d(c)) for c in coords}) != 1:
            raise StructuralError("coordinates must share one dimension")
        s = GroundSpace.euclidean(coords, labels, obj.get("domain"))
    else:
        raise StructuralError(f"unknown space kind {kind!r}")
    if s.labels[0] != "e" or "e" in s.labels[1:]:
        raise StructuralError("index 0 must be the distinguished point 'e'")
    return s


def load_space(path) -> GroundSpace:
    return space_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def sequence_from_json(obj: dict, space: GroundSpace) -> PseudometricSequence:
    """Parse ``{"metrics": [{"dist": ...} | {"scale": c}, ...], "tail": ...}``.

    ``{"scale": c}`` means ``c`` times the ground distance of ``space``.
    ``tail`` is ``"repeat-last"``, ``"zero"`` or ``{"scale": r}``.
    """
    if not isinstance(obj, dict) or not obj.get("metrics"):
        raise StructuralError("metric sequence file needs a non-empty 'metrics' list")
    base = space.matrix()
    mats = []
    for m in obj["metrics"]:
        if "dist" in m:
            arr = np.asarray(m["dist"], dtype=float)
            if arr.shape != base.shape:
                raise StructuralError("metric table does not match the space size")
        elif "scale" in m:
            arr = float(m["scale"]) * base
        else:
            raise StructuralError("metric entries need 'dist' or 'scale'")
        mats.append(arr)
    tail = obj.get("tail", "repeat-last")
    ratio = 1.0
    if isinstance(tail, dict):
        ratio = float(tail["scale"])
        tail = "scale"
    seq = PseudometricSequence.of(mats, tail, ratio)
    for n, m in enumerate(seq.metrics, 1):
        rep = validate_space(GroundSpace.from_matrix(m))
        if not rep.ok:
            raise InvalidSpaceError(f"d_{n} is not a pseudometric: {rep.violations[0].detail}")
    return seq


def load_sequence(path, space: GroundSpace) -> PseudometricSequence:
    return sequence_from_json(json.loads(Path(path).read_text(encoding="utf-8")), space)

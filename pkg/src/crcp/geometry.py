"""Points, colors, pairs, bounding boxes and monotone-norm metrics.

A dataset is a flat numpy array of coordinates plus an integer color per
point.  Distances are always taken under a :class:`MonotoneNorm`, which
covers the L_p family (p >= 1), L-infinity, and per-axis weighted variants.
All values here are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import UsageError
from . import _kernels as K

__all__ = [
    "Orientation",
    "MonotoneNorm",
    "ColoredPoint",
    "Dataset",
    "PointPair",
    "BoundingBox",
    "norm_distance",
    "classify_pair",
    "normalize_axes",
    "check_norm_equivalence",
    "strongly_adjacent",
    "load_dataset",
    "save_dataset",
]


class Orientation(enum.Enum):
    """Diagonal class of a 2D pair relative to its bounding box."""

    NE_SW = "ne-sw"
    NW_SE = "nw-se"
    BOTH = "both"


@dataclass(frozen=True)
class MonotoneNorm:
    """A monotone norm on R^d: weighted L_p with p >= 1, or L-infinity.

    ``p`` is ``math.inf`` for the max norm.  ``weights`` are per-axis
    positive scales; the plain L_p norms use unit weights.  The norm of the
    i-th standard basis vector is exactly ``weights[i]``.
    """

    dim: int
    p: float = 2.0
    weights: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise UsageError(f"norm dimension must be 2 or 3, got {self.dim}")
        if not (self.p >= 1.0):
            raise UsageError(f"p must be >= 1 (or inf), got {self.p}")
        w = self.weights if self.weights else (1.0,) * self.dim
        if len(w) != self.dim:
            raise UsageError("weights length must match dimension")
        if any(not (x > 0.0 and math.isfinite(x)) for x in w):
            raise UsageError("axis weights must be positive finite reals")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    @classmethod
    def parse(cls, spec: str, dim: int) -> "MonotoneNorm":
        """Parse a norm spec like ``l2``, ``l1``, ``linf``, ``l3.5`` or ``wl1:2,0.5``."""
        s = spec.strip().lower()
        if ":" in s:
            head, _, tail = s.partition(":")
            if not head.startswith("wl"):
                raise UsageError(f"bad norm spec {spec!r}")
            p = math.inf if head[2:] == "inf" else float(head[2:])
            weights = tuple(float(t) for t in tail.split(","))
            return cls(dim, p, weights)
        if not s.startswith("l"):
            raise UsageError(f"bad norm spec {spec!r}")
        body = s[1:]
        p = math.inf if body == "inf" else float(body)
        return cls(dim, p)

    def spec(self) -> str:
        ptxt = "inf" if self.p == math.inf else f"{self.p:g}"
        if any(w != 1.0 for w in self.weights):
            return f"wl{ptxt}:" + ",".join(f"{w:g}" for w in self.weights)
        return f"l{ptxt}"

    @property
    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)

    def axis_norms(self) -> Tuple[float, ...]:
        """Norms of the standard basis vectors."""
        return self.weights

    def __call__(self, v: Sequence[float]) -> float:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dim,):
            raise UsageError("vector dimension mismatch")
        return float(K.vec_norm(v, self.weight_array, self.p))

    def distance(self, a: Sequence[float], b: Sequence[float]) -> float:
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if a.shape != (self.dim,) or b.shape != (self.dim,):
            raise UsageError("point dimension mismatch")
        return float(K.point_dist(a, b, self.weight_array, self.p))


@dataclass(frozen=True)
class ColoredPoint:
    coords: Tuple[float, ...]
    color: int

    def __post_init__(self):
        if len(self.coords) not in (2, 3):
            raise UsageError("points must live in 2 or 3 dimensions")
        if any(not math.isfinite(c) for c in self.coords):
            raise UsageError("coordinates must be finite")
        if self.color < 0:
            raise UsageError("color must be a nonnegative integer")


class Dataset:
    """An immutable colored point set backed by numpy arrays.

    Input arrays are adopted (not copied) when already contiguous and are
    marked read-only; pass a copy to keep a writeable version.
    """

    __slots__ = ("coords", "colors")

    def __init__(self, coords, colors):
        coords = np.ascontiguousarray(coords, dtype=np.float64)
        colors = np.ascontiguousarray(colors, dtype=np.int32)
        if coords.ndim != 2 or coords.shape[1] not in (2, 3):
            raise UsageError("coords must have shape (n, 2) or (n, 3)")
        if colors.shape != (coords.shape[0],):
            raise UsageError("colors must have shape (n,)")
        if coords.size and not np.isfinite(coords).all():
            raise UsageError("coordinates must be finite")
        if colors.size and colors.min() < 0:
            raise UsageError("colors must be nonnegative")
        coords.setflags(write=False)
        colors.setflags(write=False)
        self.coords = coords
        self.colors = colors

    @classmethod
    def from_points(cls, points: Iterable[ColoredPoint]) -> "Dataset":
        pts = list(points)
        if not pts:
            return cls(np.zeros((0, 2)), np.zeros(0, dtype=np.int32))
        d = len(pts[0].coords)
        return cls(
            np.array([p.coords for p in pts], dtype=np.float64).reshape(-1, d),
            np.array([p.color for p in pts], dtype=np.int32),
        )

    @classmethod
    def empty(cls, dim: int = 2) -> "Dataset":
        return cls(np.zeros((0, dim)), np.zeros(0, dtype=np.int32))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.n

    def point(self, i: int) -> ColoredPoint:
        return ColoredPoint(tuple(self.coords[i]), int(self.colors[i]))

    def num_colors(self) -> int:
        return int(self.colors.max()) + 1 if self.n else 0

    def is_monochromatic(self) -> bool:
        return self.n == 0 or bool((self.colors == self.colors[0]).all())


@dataclass(frozen=True)
class PointPair:
    """An unordered pair of dataset point indices with cached length.

    ``a < b`` always holds; ``length`` is the distance under the norm the
    pair was created with; ``orientation`` is set for 2D pairs only.
    """

    a: int
    b: int
    length: float
    orientation: Optional[Orientation] = None

    def __post_init__(self):
        if self.a == self.b:
            raise UsageError("a pair needs two distinct points")
        if self.a > self.b:
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)

    def key(self) -> Tuple[float, int, int]:
        """Comparison key: length first, then lowest index pair."""
        return (self.length, self.a, self.b)


def make_pair(dataset: Dataset, norm: MonotoneNorm, i: int, j: int) -> PointPair:
    length = norm.distance(dataset.coords[i], dataset.coords[j])
    orient = None
    if dataset.dim == 2:
        orient = classify_pair(tuple(dataset.coords[i]), tuple(dataset.coords[j]))
    return PointPair(min(i, j), max(i, j), length, orient)


@dataclass(frozen=True)
class BoundingBox:
    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise UsageError("lo/hi dimension mismatch")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise UsageError("bounding box needs lo <= hi per axis")

    @classmethod
    def of(cls, points: Sequence[Sequence[float]]) -> "BoundingBox":
        arr = np.asarray(points, dtype=np.float64)
        return cls(tuple(arr.min(axis=0)), tuple(arr.max(axis=0)))

    def contains(self, p: Sequence[float]) -> bool:
        return all(l <= x <= h for l, x, h in zip(self.lo, p, self.hi))

    def is_vertex(self, p: Sequence[float]) -> bool:
        """True iff p sits on a corner of the box."""
        return all(x == l or x == h for l, x, h in zip(self.lo, p, self.hi))


def norm_distance(norm: MonotoneNorm, a: Sequence[float], b: Sequence[float]) -> float:
    """delta(a, b) under the given monotone norm."""
    return norm.distance(a, b)


def classify_pair(a: Sequence[float], b: Sequence[float]) -> Orientation:
    """Diagonal class of a 2D pair; ``BOTH`` when a coordinate is shared."""
    if len(a) != 2 or len(b) != 2:
        raise UsageError("classify_pair is defined for 2D points")
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    if dx == 0.0 or dy == 0.0:
        return Orientation.BOTH
    return Orientation.NE_SW if (dx > 0.0) == (dy > 0.0) else Orientation.NW_SE


def normalize_axes(dataset: Dataset, norm: MonotoneNorm) -> Tuple[Dataset, MonotoneNorm]:
    """Rescale axes so every basis vector has unit norm, preserving distances.

    Maps (x1, .., xd) to (x1*|e1|, .., xd*|ed|) and returns the image
    dataset together with the induced unit-weight norm.  Distances between
    corresponding points are preserved exactly (bit-for-bit: the distance
    kernel scales each coordinate before subtracting).
    """
    if norm.dim != dataset.dim:
        raise UsageError("norm dimension must match dataset")
    w = norm.weight_array
    if (w == 1.0).all():
        return dataset, norm
    return (
        Dataset(dataset.coords * w, dataset.colors),
        MonotoneNorm(norm.dim, norm.p),
    )


def check_norm_equivalence(norm: MonotoneNorm, samples: Sequence[Tuple[Sequence[float], Sequence[float]]]) -> bool:
    """Check the Euclidean sandwich bounds for a monotone-norm metric.

    For every sampled pair (a, b) verify
    ``(1/sqrt(d)) * L2(a,b) * min|e_i|  <=  delta(a,b)  <=  d * L2(a,b) * max|e_i|``.
    """
    if not samples:
        raise UsageError("need at least one sample pair")
    d = norm.dim
    wmin = min(norm.weights)
    wmax = max(norm.weights)
    l2 = MonotoneNorm(d, 2.0)
    for a, b in samples:
        e = l2.distance(a, b)
        delta = norm.distance(a, b)
        if not ((1.0 / math.sqrt(d)) * e * wmin <= delta <= d * e * wmax):
            return False
    return True


def pair_points(dataset: Dataset, pair: PointPair) -> Tuple[np.ndarray, np.ndarray]:
    return dataset.coords[pair.a], dataset.coords[pair.b]


def strongly_adjacent(dataset: Dataset, phi: PointPair, psi: PointPair) -> bool:
    """True iff the pairs share exactly one point which is a vertex of BB(union)."""
    shared = {phi.a, phi.b} & {psi.a, psi.b}
    if len(shared) != 1:
        return False
    s = shared.pop()
    union = sorted({phi.a, phi.b, psi.a, psi.b})
    box = BoundingBox.of([dataset.coords[i] for i in union])
    return box.is_vertex(dataset.coords[s])


# ---------------------------------------------------------------------------
# Dataset text format: one point per line, "x y [z] color", '#' comments.

def load_dataset(path) -> Dataset:
    coords = []
    colors = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (3, 4):
                raise UsageError(f"{path}:{lineno}: expected 'x y [z] color'")
            if dim is None:
                dim = len(parts) - 1
            elif len(parts) - 1 != dim:
                raise UsageError(f"{path}:{lineno}: inconsistent dimension")
            coords.append([float(t) for t in parts[:-1]])
            colors.append(int(parts[-1]))
    if dim is None:
        return Dataset.empty(2)
    return Dataset(np.array(coords, dtype=np.float64), np.array(colors, dtype=np.int32))


def save_dataset(dataset: Dataset, path, header: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"# n={dataset.n} d={dataset.dim}\n")
        for i in range(dataset.n):
            xs = " ".join(f"{c:.17g}" for c in dataset.coords[i])
            fh.write(f"{xs} {int(dataset.colors[i])}\n")

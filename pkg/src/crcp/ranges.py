"""Orthogonal query ranges and query spaces.

Every supported range is an axis-parallel box, possibly unbounded on some
sides, so containment tests reduce to closed interval checks against a
``(lo, hi)`` bound vector with +-inf for the unbounded sides.  Query spaces
group ranges of one shape and orientation and know, where defined, the
smallest range containing a given pair and whether the space is
well-behaved on a pair set (unique smallest ranges, nested for strongly
adjacent pairs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import UsageError
from .geometry import Dataset, Orientation, PointPair, classify_pair, strongly_adjacent

INF = math.inf

__all__ = [
    "OrthoRange",
    "Strip",
    "Quadrant",
    "Rect",
    "Slab",
    "TwoBox",
    "Box3",
    "Dominance3",
    "QuerySpace",
    "StripSpace",
    "QuadrantSpace",
    "SlabSpace",
    "TwoBoxSpace",
    "RectSpace",
    "Box3Space",
    "Dominance3Space",
    "contains_point",
    "contains_pair",
    "range_subseteq",
    "smallest_range",
    "check_well_behaved",
    "WellBehavedViolation",
    "parse_query",
    "format_query",
    "load_queries",
]


@dataclass(frozen=True)
class OrthoRange:
    """Closed axis-parallel box; subclasses tag the query shape."""

    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise UsageError("lo/hi dimension mismatch")
        for l, h in zip(self.lo, self.hi):
            if not l <= h:
                raise UsageError(f"interval [{l}, {h}] is empty")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return (
            np.asarray(self.lo, dtype=np.float64),
            np.asarray(self.hi, dtype=np.float64),
        )


def _box(dim, bounded):
    lo = [-INF] * dim
    hi = [INF] * dim
    for axis, (l, h) in bounded.items():
        lo[axis] = l
        hi[axis] = h
    return tuple(lo), tuple(hi)


class Strip(OrthoRange):
    """2D range bounded on both sides in exactly one axis."""

    def __init__(self, axis: int, lo: float, hi: float):
        if axis not in (0, 1):
            raise UsageError("strip axis must be 0 or 1")
        l, h = _box(2, {axis: (lo, hi)})
        super().__init__(l, h)
        object.__setattr__(self, "axis", axis)


class Slab(OrthoRange):
    """d-dimensional range bounded on both sides in exactly one axis."""

    def __init__(self, dim: int, axis: int, lo: float, hi: float):
        if not 0 <= axis < dim:
            raise UsageError("slab axis out of range")
        l, h = _box(dim, {axis: (lo, hi)})
        super().__init__(l, h)
        object.__setattr__(self, "axis", axis)


class Quadrant(OrthoRange):
    """2D range bounded on one side in both axes; signs +1 mean [c, inf)."""

    def __init__(self, signs: Tuple[int, int], corner: Tuple[float, float]):
        if any(s not in (-1, 1) for s in signs):
            raise UsageError("quadrant signs must be +-1")
        bounded = {}
        for axis, (s, c) in enumerate(zip(signs, corner)):
            bounded[axis] = (c, INF) if s > 0 else (-INF, c)
        l, h = _box(2, bounded)
        super().__init__(l, h)
        object.__setattr__(self, "signs", tuple(signs))
        object.__setattr__(self, "corner", tuple(float(c) for c in corner))


class TwoBox(OrthoRange):
    """d-dimensional range bounded on one side in exactly two axes."""

    def __init__(self, dim: int, axes: Tuple[int, int], signs: Tuple[int, int], corner: Tuple[float, float]):
        if len(set(axes)) != 2 or any(not 0 <= a < dim for a in axes):
            raise UsageError("two-box needs two distinct in-range axes")
        if any(s not in (-1, 1) for s in signs):
            raise UsageError("two-box signs must be +-1")
        bounded = {}
        for axis, s, c in zip(axes, signs, corner):
            bounded[axis] = (c, INF) if s > 0 else (-INF, c)
        l, h = _box(dim, bounded)
        super().__init__(l, h)
        object.__setattr__(self, "axes", tuple(axes))
        object.__setattr__(self, "signs", tuple(signs))
        object.__setattr__(self, "corner", tuple(float(c) for c in corner))


class Rect(OrthoRange):
    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        super().__init__((x_lo, y_lo), (x_hi, y_hi))


class Box3(OrthoRange):
    def __init__(self, bounds: Sequence[float]):
        x0, x1, y0, y1, z0, z1 = bounds
        super().__init__((x0, y0, z0), (x1, y1, z1))


class Dominance3(OrthoRange):
    def __init__(self, corner: Tuple[float, float, float]):
        super().__init__(tuple(float(c) for c in corner), (INF, INF, INF))
        object.__setattr__(self, "corner", tuple(float(c) for c in corner))


def contains_point(rng: OrthoRange, p: Sequence[float]) -> bool:
    if len(p) != rng.dim:
        raise UsageError("point/range dimension mismatch")
    return all(l <= x <= h for l, x, h in zip(rng.lo, p, rng.hi))


def contains_pair(rng: OrthoRange, dataset: Dataset, pair: PointPair) -> bool:
    return contains_point(rng, dataset.coords[pair.a]) and contains_point(
        rng, dataset.coords[pair.b]
    )


def range_subseteq(x: OrthoRange, y: OrthoRange) -> bool:
    """X subseteq Y for same-dimension orthogonal ranges."""
    if x.dim != y.dim:
        raise UsageError("range dimension mismatch")
    return all(xl >= yl for xl, yl in zip(x.lo, y.lo)) and all(
        xh <= yh for xh, yh in zip(x.hi, y.hi)
    )


# ---------------------------------------------------------------------------
# query spaces


class QuerySpace:
    """A family of same-shape ranges with a containment partial order."""

    dim: int

    def smallest(self, dataset: Dataset, pair: PointPair) -> OrthoRange:
        raise NotImplementedError

    def member(self, rng: OrthoRange) -> bool:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class StripSpace(QuerySpace):
    """Vertical (axis=0) or horizontal (axis=1) strips in the plane."""

    axis: int

    dim = 2

    def smallest(self, dataset, pair):
        a = dataset.coords[pair.a, self.axis]
        b = dataset.coords[pair.b, self.axis]
        return Strip(self.axis, min(a, b), max(a, b))

    def member(self, rng):
        return isinstance(rng, Strip) and rng.axis == self.axis

    def describe(self):
        return "vertical-strips" if self.axis == 0 else "horizontal-strips"


@dataclass(frozen=True)
class SlabSpace(QuerySpace):
    """Slabs bounded in one fixed axis of R^d."""

    d: int
    axis: int

    @property
    def dim(self):
        return self.d

    def smallest(self, dataset, pair):
        a = dataset.coords[pair.a, self.axis]
        b = dataset.coords[pair.b, self.axis]
        return Slab(self.d, self.axis, min(a, b), max(a, b))

    def member(self, rng):
        return isinstance(rng, Slab) and rng.dim == self.d and rng.axis == self.axis

    def describe(self):
        return f"slabs(d={self.d}, axis={self.axis})"


def _required_orientation(signs: Tuple[int, int]) -> Orientation:
    # A product of the two axis reflections either preserves or swaps the
    # diagonal classes; quadrant spaces are well-behaved on the class that
    # maps to NW-SE in the reflected frame.
    return Orientation.NW_SE if signs[0] * signs[1] > 0 else Orientation.NE_SW


@dataclass(frozen=True)
class QuadrantSpace(QuerySpace):
    """Quadrants of one orientation; signs (+1, +1) are the northeast ones."""

    signs: Tuple[int, int]

    dim = 2

    def required_orientation(self) -> Orientation:
        return _required_orientation(self.signs)

    def smallest(self, dataset, pair):
        orient = classify_pair(tuple(dataset.coords[pair.a]), tuple(dataset.coords[pair.b]))
        need = self.required_orientation()
        if orient is not Orientation.BOTH and orient is not need:
            raise UsageError(
                f"{self.describe()} requires {need.value} pairs, got {orient.value}"
            )
        corner = []
        for axis, s in enumerate(self.signs):
            a = dataset.coords[pair.a, axis]
            b = dataset.coords[pair.b, axis]
            corner.append(min(a, b) if s > 0 else max(a, b))
        return Quadrant(self.signs, tuple(corner))

    def member(self, rng):
        return isinstance(rng, Quadrant) and rng.signs == self.signs

    def describe(self):
        names = {(1, 1): "ne", (-1, 1): "nw", (-1, -1): "sw", (1, -1): "se"}
        return f"{names[self.signs]}-quadrants"


@dataclass(frozen=True)
class TwoBoxSpace(QuerySpace):
    """Two-boxes bounded on one side in a fixed axis pair of R^d."""

    d: int
    axes: Tuple[int, int]
    signs: Tuple[int, int]

    @property
    def dim(self):
        return self.d

    def required_orientation(self) -> Orientation:
        return _required_orientation(self.signs)

    def smallest(self, dataset, pair):
        pa = dataset.coords[pair.a]
        pb = dataset.coords[pair.b]
        proj_a = (pa[self.axes[0]], pa[self.axes[1]])
        proj_b = (pb[self.axes[0]], pb[self.axes[1]])
        orient = classify_pair(proj_a, proj_b)
        need = self.required_orientation()
        if orient is not Orientation.BOTH and orient is not need:
            raise UsageError(
                f"{self.describe()} requires projected {need.value} pairs, got {orient.value}"
            )
        corner = []
        for (ca, cb), s in zip(zip(proj_a, proj_b), self.signs):
            corner.append(min(ca, cb) if s > 0 else max(ca, cb))
        return TwoBox(self.d, self.axes, self.signs, tuple(corner))

    def member(self, rng):
        return (
            isinstance(rng, TwoBox)
            and rng.dim == self.d
            and rng.axes == self.axes
            and rng.signs == self.signs
        )

    def describe(self):
        return f"two-boxes(d={self.d}, axes={self.axes}, signs={self.signs})"


@dataclass(frozen=True)
class RectSpace(QuerySpace):
    """All axis-parallel rectangles.  Smallest elements exist (bounding
    boxes) but the space is not well-behaved in general; closest-pair
    structures compose strips, quadrants, and anchored queries instead."""

    dim = 2

    def smallest(self, dataset, pair):
        a = dataset.coords[pair.a]
        b = dataset.coords[pair.b]
        return Rect(min(a[0], b[0]), max(a[0], b[0]), min(a[1], b[1]), max(a[1], b[1]))

    def member(self, rng):
        return isinstance(rng, Rect)

    def describe(self):
        return "rectangles"


@dataclass(frozen=True)
class Box3Space(QuerySpace):
    dim = 3

    def smallest(self, dataset, pair):
        a = dataset.coords[pair.a]
        b = dataset.coords[pair.b]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        return Box3([lo[0], hi[0], lo[1], hi[1], lo[2], hi[2]])

    def member(self, rng):
        return isinstance(rng, Box3)

    def describe(self):
        return "boxes3"


@dataclass(frozen=True)
class Dominance3Space(QuerySpace):
    dim = 3

    def smallest(self, dataset, pair):
        lo = np.minimum(dataset.coords[pair.a], dataset.coords[pair.b])
        return Dominance3((float(lo[0]), float(lo[1]), float(lo[2])))

    def member(self, rng):
        return isinstance(rng, Dominance3)

    def describe(self):
        return "dominance3"


@dataclass(frozen=True)
class WellBehavedViolation:
    reason: str
    pairs: Tuple[PointPair, ...]


def check_well_behaved(
    space: QuerySpace, dataset: Dataset, pairs: Sequence[PointPair]
) -> Optional[WellBehavedViolation]:
    """Check both well-behavedness conditions on a finite pair set.

    Returns ``None`` when every pair has a smallest containing range and the
    smallest ranges of every strongly adjacent pair are nested; otherwise a
    witness.  This is a test utility quantified over the given set, not a
    prover.
    """
    smallest = []
    for pair in pairs:
        try:
            smallest.append(space.smallest(dataset, pair))
        except UsageError as exc:
            return WellBehavedViolation(f"no smallest range: {exc}", (pair,))
    m = len(pairs)
    for i in range(m):
        for j in range(i + 1, m):
            if not strongly_adjacent(dataset, pairs[i], pairs[j]):
                continue
            if not (
                range_subseteq(smallest[i], smallest[j])
                or range_subseteq(smallest[j], smallest[i])
            ):
                return WellBehavedViolation(
                    "smallest ranges of strongly adjacent pairs are not nested",
                    (pairs[i], pairs[j]),
                )
    return None


def smallest_range(space: QuerySpace, dataset: Dataset, pair: PointPair) -> OrthoRange:
    return space.smallest(dataset, pair)


# ---------------------------------------------------------------------------
# query text format, one range per line:
#   STRIP axis lo hi | QUAD sx sy cx cy | RECT x- x+ y- y+ | SLAB axis lo hi
#   | 2BOX ax1 ax2 s1 s2 c1 c2 | BOX3 x- x+ y- y+ z- z+ | DOM3 x- y- z-


def _sign(tok: str) -> int:
    if tok in ("+", "+1", "1"):
        return 1
    if tok in ("-", "-1"):
        return -1
    raise UsageError(f"bad sign {tok!r}")


def _num(tok: str) -> float:
    t = tok.strip().lower()
    if t in ("inf", "+inf"):
        return INF
    if t == "-inf":
        return -INF
    return float(tok)


def parse_query(line: str, dim3: int = 3) -> OrthoRange:
    parts = line.split()
    if not parts:
        raise UsageError("empty query line")
    tag = parts[0].upper()
    args = parts[1:]
    if tag == "STRIP" and len(args) == 3:
        return Strip(int(args[0]), _num(args[1]), _num(args[2]))
    if tag == "QUAD" and len(args) == 4:
        return Quadrant((_sign(args[0]), _sign(args[1])), (_num(args[2]), _num(args[3])))
    if tag == "RECT" and len(args) == 4:
        return Rect(_num(args[0]), _num(args[1]), _num(args[2]), _num(args[3]))
    if tag == "SLAB" and len(args) == 3:
        return Slab(dim3, int(args[0]), _num(args[1]), _num(args[2]))
    if tag == "2BOX" and len(args) == 6:
        return TwoBox(
            dim3,
            (int(args[0]), int(args[1])),
            (_sign(args[2]), _sign(args[3])),
            (_num(args[4]), _num(args[5])),
        )
    if tag == "BOX3" and len(args) == 6:
        return Box3([_num(a) for a in args])
    if tag == "DOM3" and len(args) == 3:
        return Dominance3((_num(args[0]), _num(args[1]), _num(args[2])))
    raise UsageError(f"bad query line {line!r}")


def format_query(rng: OrthoRange) -> str:
    def f(x):
        if x == INF:
            return "inf"
        if x == -INF:
            return "-inf"
        return f"{x:.17g}"

    if isinstance(rng, Strip):
        return f"STRIP {rng.axis} {f(rng.lo[rng.axis])} {f(rng.hi[rng.axis])}"
    if isinstance(rng, Quadrant):
        s = ["+" if x > 0 else "-" for x in rng.signs]
        return f"QUAD {s[0]} {s[1]} {f(rng.corner[0])} {f(rng.corner[1])}"
    if isinstance(rng, Rect):
        return f"RECT {f(rng.lo[0])} {f(rng.hi[0])} {f(rng.lo[1])} {f(rng.hi[1])}"
    if isinstance(rng, Slab):
        return f"SLAB {rng.axis} {f(rng.lo[rng.axis])} {f(rng.hi[rng.axis])}"
    if isinstance(rng, TwoBox):
        s = ["+" if x > 0 else "-" for x in rng.signs]
        return (
            f"2BOX {rng.axes[0]} {rng.axes[1]} {s[0]} {s[1]} "
            f"{f(rng.corner[0])} {f(rng.corner[1])}"
        )
    if isinstance(rng, Dominance3):
        return f"DOM3 {f(rng.corner[0])} {f(rng.corner[1])} {f(rng.corner[2])}"
    if rng.dim == 3:
        return "BOX3 " + " ".join(
            f(v) for pair in zip(rng.lo, rng.hi) for v in pair
        )
    return "RECT " + f"{f(rng.lo[0])} {f(rng.hi[0])} {f(rng.lo[1])} {f(rng.hi[1])}"


def load_queries(path, dim3: int = 3) -> List[OrthoRange]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                out.append(parse_query(line, dim3))
    return out

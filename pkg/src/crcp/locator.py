"""Lightest contained pair queries for strip-like and quadrant-like ranges.

Each pair reduces to a 2D key on the bounded axes; containment of the pair
in a query range becomes a two-sided dominance condition on the key, and the
locator answers minimum-weight-under-dominance via a static segment tree
whose nodes keep value-sorted members with running prefix minima.  Space is
O(m log m) and queries cost two nested binary searches.
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .errors import UsageError
from .geometry import Dataset, MonotoneNorm, PointPair, make_pair
from .ranges import (
    OrthoRange,
    Quadrant,
    QuadrantSpace,
    Slab,
    SlabSpace,
    Strip,
    StripSpace,
    TwoBox,
    TwoBoxSpace,
)

__all__ = ["PairLocator", "build_locator", "query_lightest"]


class PairLocator:
    """Immutable lightest-contained-pair structure over a weighted pair set."""

    def __init__(self, dataset: Dataset, norm: MonotoneNorm, space, pair_array, weights=None):
        if not isinstance(space, (StripSpace, SlabSpace, QuadrantSpace, TwoBoxSpace)):
            raise UsageError(f"unsupported locator space {space!r}")
        self.space = space
        self.dataset = dataset
        self.norm = norm
        arr = np.ascontiguousarray(pair_array, dtype=np.int32).reshape(-1, 2)
        self.pair_array = arr
        m = arr.shape[0]
        if weights is None:
            weights = K.pair_lengths(dataset.coords, arr, norm.weight_array, norm.p)
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if weights.shape != (m,):
            raise UsageError("weights must align with pairs")
        if m and not np.isfinite(weights).all():
            raise UsageError("weights must be finite")
        self.weights = weights
        u, v = self._keys(arr)
        order = np.lexsort((np.arange(m), -u)).astype(np.int64)
        self._u_sorted = np.ascontiguousarray(u[order])
        self._v_sorted = np.ascontiguousarray(v[order])
        self._w_sorted = np.ascontiguousarray(weights[order])
        self._i_sorted = np.ascontiguousarray(order.astype(np.int32))
        (
            self._count,
            self._lo,
            self._hi,
            self._left,
            self._right,
            self._ent,
        ) = K.locator_layout(m, K.LOC_BUCKET)
        self._ev, self._ew, self._ei, self._pmw, self._pmi = K.locator_fill(
            self._count,
            self._lo,
            self._hi,
            self._left,
            self._right,
            self._ent,
            self._u_sorted,
            self._v_sorted,
            self._w_sorted,
            self._i_sorted,
        )

    def _keys(self, arr) -> Tuple[np.ndarray, np.ndarray]:
        coords = self.dataset.coords
        space = self.space
        if isinstance(space, (StripSpace, SlabSpace)):
            va = coords[arr[:, 0], space.axis]
            vb = coords[arr[:, 1], space.axis]
            return np.minimum(va, vb), np.maximum(va, vb)
        axes = (0, 1) if isinstance(space, QuadrantSpace) else space.axes
        s0, s1 = space.signs
        u = s0 * coords[:, axes[0]]
        v = s1 * coords[:, axes[1]]
        cu = np.minimum(u[arr[:, 0]], u[arr[:, 1]])
        cv = np.minimum(v[arr[:, 0]], v[arr[:, 1]])
        return cu, -cv

    def _query_key(self, rng: OrthoRange) -> Tuple[float, float]:
        space = self.space
        if isinstance(space, (StripSpace, SlabSpace)):
            ok = isinstance(rng, (Strip, Slab)) and getattr(rng, "axis", None) == space.axis
            if not ok or rng.dim != self.dataset.dim:
                raise UsageError(f"range {rng!r} does not match {space.describe()}")
            return rng.lo[space.axis], rng.hi[space.axis]
        if isinstance(space, QuadrantSpace):
            if not (isinstance(rng, Quadrant) and rng.signs == space.signs):
                raise UsageError(f"range {rng!r} does not match {space.describe()}")
            corner = rng.corner
            return space.signs[0] * corner[0], -(space.signs[1] * corner[1])
        if not (
            isinstance(rng, TwoBox)
            and rng.axes == space.axes
            and rng.signs == space.signs
            and rng.dim == space.d
        ):
            raise UsageError(f"range {rng!r} does not match {space.describe()}")
        corner = rng.corner
        return space.signs[0] * corner[0], -(space.signs[1] * corner[1])

    @property
    def size(self) -> int:
        return self.pair_array.shape[0]

    def node_count(self) -> int:
        return int(self._count) + 3 * int(self._ent[self._count]) if self._count else 0

    def query_index(self, rng: OrthoRange) -> Optional[int]:
        """Index (into the input pair list) of the lightest contained pair."""
        qa, qb = self._query_key(rng)
        idx, _w = K.locator_query(
            self._count,
            self._lo,
            self._hi,
            self._left,
            self._right,
            self._ent,
            self._ev,
            self._pmw,
            self._pmi,
            self._u_sorted,
            self._v_sorted,
            self._w_sorted,
            self._i_sorted,
            qa,
            qb,
        )
        return None if idx < 0 else int(idx)

    def query(self, rng: OrthoRange) -> Optional[PointPair]:
        idx = self.query_index(rng)
        if idx is None:
            return None
        a, b = self.pair_array[idx]
        return make_pair(self.dataset, self.norm, int(a), int(b))

    def scan_index(self, rng: OrthoRange) -> Optional[int]:
        """Linear-scan oracle with the same reduction and tie-break."""
        qa, qb = self._query_key(rng)
        best = None
        u, v = self._keys(self.pair_array)
        for t in range(self.size):
            if u[t] >= qa and v[t] <= qb:
                cand = (self.weights[t], t)
                if best is None or cand < best:
                    best = cand
        return None if best is None else best[1]


def build_locator(
    dataset: Dataset,
    norm: MonotoneNorm,
    pairs: Sequence[PointPair],
    space,
    weights=None,
) -> PairLocator:
    arr = np.array([[p.a, p.b] for p in pairs], dtype=np.int32).reshape(-1, 2)
    if weights is None and pairs:
        weights = np.array([p.length for p in pairs], dtype=np.float64)
    return PairLocator(dataset, norm, space, arr, weights)


def query_lightest(locator: PairLocator, rng: OrthoRange) -> Optional[PointPair]:
    return locator.query(rng)

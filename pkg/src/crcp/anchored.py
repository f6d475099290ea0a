"""Anchored CRCP structures: closest bichromatic pair whose bounding box
contains a query anchor, restricted to a query rectangle or box.

The anchor splits the query box into opposite corner regions; those are cut
by a fan of fixed directions through the anchor into narrow sectors, and a
per-sector top-2 store reports the two closest points to the anchor (in the
L1 sense, via additive weights) with distinct colors.  The closest pair of
the collected candidates is the answer.  Diagonal pair classes other than
the main one are handled by reflecting axes; the first axis is never
reflected, so each unordered anchored pair is covered exactly once per
class.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .errors import UsageError
from .geometry import Dataset, MonotoneNorm, PointPair, make_pair, normalize_axes
from .ranges import Box3, Rect, contains_point
from .top2 import Top2Family

__all__ = [
    "AnchoredIndex2D",
    "AnchoredIndex3D",
    "build_anchored2d",
    "build_anchored3d",
    "query_anchored2d",
    "query_anchored3d",
]


def _angle_tables(k: int) -> Tuple[np.ndarray, np.ndarray]:
    """cos/sin of i*pi/(2k) for i = 0..k with exact axis endpoints."""
    alphas = np.arange(k + 1) * (math.pi / (2 * k))
    cos = np.cos(alphas)
    sin = np.sin(alphas)
    cos[0], sin[0] = 1.0, 0.0
    cos[k], sin[k] = 0.0, 1.0
    return cos, sin


def _inf_dot(delta: float, coef: float) -> float:
    # delta may be +inf when a box side is unbounded; 0 * inf must read as 0
    if coef == 0.0:
        return 0.0
    return delta * coef


class _ClassStores2D:
    """Sector stores of one diagonal class: U covers the (+,+) corner region
    of the anchor in reflected coordinates, V the (-,-) one."""

    def __init__(self, coords, colors, sy: int, k: int, cos, sin, t0: int):
        self.sy = sy
        self.k = k
        n = coords.shape[0]
        refl = coords.copy()
        refl[:, 1] *= sy
        weight = refl[:, 0] + refl[:, 1]
        self.fams = {}
        for role in (1, -1):
            wedge_lo = np.stack([cos[:-1], -sy * sin[:-1]], axis=1)  # i-1 line, >= side
            wedge_hi = np.stack([-cos[1:], sy * sin[1:]], axis=1)  # i line, <= side
            ax_x = np.tile(np.array([-1.0, 0.0]), (k, 1))
            ax_y = np.tile(np.array([0.0, -float(sy)]), (k, 1))
            if role < 0:
                wedge_lo = -wedge_lo
                wedge_hi = -wedge_hi
                ax_x = -ax_x
                ax_y = -ax_y
            dirs4 = np.stack([wedge_lo, wedge_hi, ax_x, ax_y], axis=1)
            dirsv = np.stack([wedge_lo, wedge_hi, ax_x], axis=1)
            dirsh = np.stack([wedge_lo, wedge_hi, ax_y], axis=1)
            w = role * weight
            self.fams[role] = (
                Top2Family(coords, w, colors, dirs4, t0),
                Top2Family(coords, w, colors, dirsv, t0),
                Top2Family(coords, w, colors, dirsh, t0),
            )

    def node_count(self) -> int:
        return sum(f.node_count() for fams in self.fams.values() for f in fams)


class AnchoredIndex2D:
    """(1+eps)-approximate anchored CRCP index for rectangle queries."""

    def __init__(self, dataset: Dataset, norm: MonotoneNorm, eps: float, t0: int = 8):
        if dataset.dim != 2 or norm.dim != 2:
            raise UsageError("anchored 2D index needs a 2D dataset and norm")
        if not eps > 0.0:
            raise UsageError("eps must be strictly positive")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        self.theta = eps / 8.0
        self.k = int(math.ceil(math.pi / (2.0 * self.theta)))
        norm_ds, norm_unit = normalize_axes(dataset, norm)
        self.coords = norm_ds.coords
        self.colors = norm_ds.colors
        self.norm_unit = norm_unit
        self.scale = norm.weight_array
        self.cos, self.sin = _angle_tables(self.k)
        self.classes = [
            _ClassStores2D(self.coords, self.colors, sy, self.k, self.cos, self.sin, t0)
            for sy in (1, -1)
        ]
        self._all = np.arange(self.k, dtype=np.int64)

    def node_count(self) -> int:
        return sum(c.node_count() for c in self.classes)

    def _query_role(self, cls: _ClassStores2D, role: int, o, dxc, dyc, ax_mu, ay_mu, rows: list):
        """Query one corner region's sector stores and collect candidates."""
        k = self.k
        # value of each fan line at the region corner decides the sector
        # shape: positive lower line -> top triangle (y side binds),
        # negative upper line -> right triangle (x side binds), else 4-gon.
        f = np.empty(k + 1)
        for i in range(k + 1):
            f[i] = _inf_dot(dxc, self.cos[i]) - _inf_dot(dyc, self.sin[i])
        top = f[1:] > 0.0
        rightt = f[:-1] < 0.0
        fam4, famv, famh = cls.fams[role]
        wlo_mu = fam4.dirs[:, 0, :] @ o
        whi_mu = fam4.dirs[:, 1, :] @ o
        for fam, mask, extra in (
            (famh, top, ay_mu),
            (famv, rightt & ~top, ax_mu),
            (fam4, ~top & ~rightt, None),
        ):
            ids = self._all[mask]
            if not len(ids):
                continue
            mus = np.empty((len(ids), fam.c))
            mus[:, 0] = wlo_mu[ids]
            mus[:, 1] = whi_mu[ids]
            if extra is None:
                mus[:, 2] = ax_mu
                mus[:, 3] = ay_mu
            else:
                mus[:, 2] = extra
            outf = np.empty(len(ids), dtype=np.int64)
            outs = np.empty(len(ids), dtype=np.int64)
            tm = fam.template
            K.top2_query_selected(
                fam.scal3, ids, mus, True,
                tm.s_kind, tm.s_level, tm.s_off, tm.s_size,
                tm.s_node_base, tm.s_node_count,
                tm.n_rel_lo, tm.n_rel_hi, tm.n_left, tm.n_right,
                tm.n_ent_off, tm.n_bri_off,
                fam._order, fam._entp, fam._t2f, fam._t2s, fam._briL, fam._briR,
                fam.weights, fam.colors, outf, outs,
            )
            rows.extend(int(r) for r in outf if r >= 0)
            rows.extend(int(r) for r in outs if r >= 0)

    def query(self, rect: Rect, o: Sequence[float]) -> Optional[PointPair]:
        """Closest o-anchored bichromatic pair in the rectangle, within 1+eps."""
        if rect.dim != 2 or len(o) != 2:
            raise UsageError("rectangle query needs a 2D rectangle and anchor")
        if not contains_point(rect, o):
            return None
        lo = np.asarray(rect.lo) * self.scale
        hi = np.asarray(rect.hi) * self.scale
        on = np.asarray(o, dtype=np.float64) * self.scale
        best = None
        for cls in self.classes:
            sy = cls.sy
            uy_lo = min(sy * lo[1], sy * hi[1])
            uy_hi = max(sy * lo[1], sy * hi[1])
            uy_o = sy * on[1]
            rows: list = []
            self._query_role(cls, 1, on, hi[0] - on[0], uy_hi - uy_o, -hi[0], -uy_hi, rows)
            self._query_role(cls, -1, on, on[0] - lo[0], uy_o - uy_lo, lo[0], uy_lo, rows)
            if not rows:
                continue
            cand = np.unique(np.asarray(rows, dtype=np.int64))
            a, b, l = K.anchored_best_pair(
                self.coords, self.colors, self.norm_unit.weight_array,
                self.norm_unit.p, cand, on, lo, hi,
            )
            if a >= 0 and (best is None or (l, a, b) < best):
                best = (l, int(a), int(b))
        if best is None:
            return None
        return make_pair(self.dataset, self.norm, best[1], best[2])


class _ClassStores3D:
    """One diagonal class in 3D: a k*k grid of 7-halfspace stores per role."""

    def __init__(self, coords, colors, signs, k, cos, sin, t0):
        self.signs = signs
        self.k = k
        sy, sz = signs[1], signs[2]
        refl = coords * np.asarray([1.0, sy, sz])
        weight = refl.sum(axis=1)
        root2 = math.sqrt(2.0)
        dirs = np.empty((k * k, 7, 3))
        for i in range(1, k + 1):
            azi_lo = np.array([cos[i - 1], -sy * sin[i - 1], 0.0])
            azi_hi = np.array([-cos[i], sy * sin[i], 0.0])
            for j in range(1, k + 1):
                pol_lo = np.array([cos[j - 1], sy * cos[j - 1], -sz * root2 * sin[j - 1]])
                pol_hi = np.array([-cos[j], -sy * cos[j], sz * root2 * sin[j]])
                s = (i - 1) * k + (j - 1)
                dirs[s, 0] = azi_lo
                dirs[s, 1] = azi_hi
                dirs[s, 2] = pol_lo
                dirs[s, 3] = pol_hi
                dirs[s, 4] = (-1.0, 0.0, 0.0)
                dirs[s, 5] = (0.0, -sy, 0.0)
                dirs[s, 6] = (0.0, 0.0, -sz)
        self.fams = {
            1: Top2Family(coords, weight, colors, dirs, t0),
            -1: Top2Family(coords, -weight, colors, -dirs, t0),
        }

    def node_count(self) -> int:
        return sum(f.node_count() for f in self.fams.values())


class AnchoredIndex3D:
    """(1+eps)-approximate anchored CRCP index for 3D box queries."""

    def __init__(self, dataset: Dataset, norm: MonotoneNorm, eps: float, t0: int = 8):
        if dataset.dim != 3 or norm.dim != 3:
            raise UsageError("anchored 3D index needs a 3D dataset and norm")
        if not eps > 0.0:
            raise UsageError("eps must be strictly positive")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        self.theta = eps / 18.0
        self.k = int(math.ceil(math.pi / (4.0 * self.theta)))
        norm_ds, norm_unit = normalize_axes(dataset, norm)
        self.coords = norm_ds.coords
        self.colors = norm_ds.colors
        self.norm_unit = norm_unit
        self.scale = norm.weight_array
        self.cos, self.sin = _angle_tables(self.k)
        self.classes = [
            _ClassStores3D(self.coords, self.colors, s, self.k, self.cos, self.sin, t0)
            for s in ((1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1))
        ]
        self._all = np.arange(self.k * self.k, dtype=np.int64)

    def node_count(self) -> int:
        return sum(c.node_count() for c in self.classes)

    def _query_role(self, cls: _ClassStores3D, role: int, o, ax_mus, rows: list):
        fam = cls.fams[role]
        S = self.k * self.k
        mus = np.empty((S, 7))
        for t in range(4):
            mus[:, t] = fam.dirs[:, t, :] @ o
        mus[:, 4] = ax_mus[0]
        mus[:, 5] = ax_mus[1]
        mus[:, 6] = ax_mus[2]
        outf = np.empty(S, dtype=np.int64)
        outs = np.empty(S, dtype=np.int64)
        tm = fam.template
        K.top2_query_selected(
            fam.scal3, self._all, mus, True,
            tm.s_kind, tm.s_level, tm.s_off, tm.s_size,
            tm.s_node_base, tm.s_node_count,
            tm.n_rel_lo, tm.n_rel_hi, tm.n_left, tm.n_right,
            tm.n_ent_off, tm.n_bri_off,
            fam._order, fam._entp, fam._t2f, fam._t2s, fam._briL, fam._briR,
            fam.weights, fam.colors, outf, outs,
        )
        rows.extend(int(r) for r in outf if r >= 0)
        rows.extend(int(r) for r in outs if r >= 0)

    def query(self, box: Box3, o: Sequence[float]) -> Optional[PointPair]:
        if box.dim != 3 or len(o) != 3:
            raise UsageError("box query needs a 3D box and anchor")
        if not contains_point(box, o):
            return None
        lo = np.asarray(box.lo) * self.scale
        hi = np.asarray(box.hi) * self.scale
        on = np.asarray(o, dtype=np.float64) * self.scale
        best = None
        for cls in self.classes:
            sy, sz = cls.signs[1], cls.signs[2]
            u_lo = np.array([lo[0], min(sy * lo[1], sy * hi[1]), min(sz * lo[2], sz * hi[2])])
            u_hi = np.array([hi[0], max(sy * lo[1], sy * hi[1]), max(sz * lo[2], sz * hi[2])])
            rows: list = []
            self._query_role(cls, 1, on, -u_hi, rows)
            self._query_role(cls, -1, on, u_lo, rows)
            if not rows:
                continue
            cand = np.unique(np.asarray(rows, dtype=np.int64))
            a, b, l = K.anchored_best_pair(
                self.coords, self.colors, self.norm_unit.weight_array,
                self.norm_unit.p, cand, on, lo, hi,
            )
            if a >= 0 and (best is None or (l, a, b) < best):
                best = (l, int(a), int(b))
        if best is None:
            return None
        return make_pair(self.dataset, self.norm, best[1], best[2])


def build_anchored2d(dataset: Dataset, norm: MonotoneNorm, eps: float) -> AnchoredIndex2D:
    return AnchoredIndex2D(dataset, norm, eps)


def build_anchored3d(dataset: Dataset, norm: MonotoneNorm, eps: float) -> AnchoredIndex3D:
    return AnchoredIndex3D(dataset, norm, eps)


def query_anchored2d(index: AnchoredIndex2D, rect: Rect, o) -> Optional[PointPair]:
    return index.query(rect, o)


def query_anchored3d(index: AnchoredIndex3D, box: Box3, o) -> Optional[PointPair]:
    return index.query(box, o)

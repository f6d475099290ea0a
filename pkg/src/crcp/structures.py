"""Composed (1+eps)-approximate CRCP indexes.

Strip/slab indexes store a coreset of the bichromatic pairs behind a
lightest-contained-pair locator, one per orientation.  Quadrant/two-box
indexes add the per-point nearest differently-colored dominating neighbors
for the diagonal class the coreset cannot cover.  Rectangle and 3D
dominance indexes reduce to those via range trees whose canonical nodes
carry sub-indexes, plus an anchored index queried at separator anchors.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .anchored import AnchoredIndex2D, AnchoredIndex3D
from .coreset import build_coreset, pairs_for_space
from .errors import UsageError
from .geometry import Dataset, MonotoneNorm, PointPair, make_pair
from .locator import PairLocator
from .rangetree import RangeTree1D
from .ranges import (
    Box3,
    Dominance3,
    OrthoRange,
    Quadrant,
    QuadrantSpace,
    Rect,
    Slab,
    SlabSpace,
    Strip,
    StripSpace,
    TwoBox,
    TwoBoxSpace,
)

__all__ = [
    "StripIndex",
    "QuadrantIndex",
    "SlabIndex",
    "TwoBoxIndex",
    "RectIndexV1",
    "RectIndexV2",
    "Dominance3Index",
    "build_index",
    "INDEX_KINDS",
]

Cand = Tuple[float, int, int]  # (length, a, b) with global point ids


def _best(cands: Sequence[Cand]) -> Optional[Cand]:
    return min(cands) if cands else None


class _CoresetLocatorPart:
    """Coreset + locator of the bichromatic pairs of a point subset.

    Sub-structure of the composed indexes; orientation filtering happens in
    ``pairs_for_space`` and well-behavedness of the built-in spaces on such
    pairs is covered by the dedicated coreset tests, so construction skips
    the quadratic runtime check.
    """

    def __init__(self, dataset: Dataset, norm: MonotoneNorm, eps: float, rows, space):
        self.rows = np.asarray(rows, dtype=np.int64)
        self.space = space
        self.local = Dataset(dataset.coords[self.rows], dataset.colors[self.rows])
        arr = pairs_for_space(self.local, space)
        res = build_coreset(self.local, norm, arr, space, eps, validate="off")
        self.coreset_size = res.size()
        self.input_pairs = arr.shape[0]
        self.locator = PairLocator(self.local, norm, space, res.pair_array, res.lengths)

    def query(self, rng: OrthoRange) -> Optional[Cand]:
        idx = self.locator.query_index(rng)
        if idx is None:
            return None
        a, b = self.locator.pair_array[idx]
        w = float(self.locator.weights[idx])
        ga, gb = int(self.rows[a]), int(self.rows[b])
        return (w, min(ga, gb), max(ga, gb))

    def node_count(self) -> int:
        return self.coreset_size + self.locator.node_count()

    def drop_pair_for_test(self, t: int) -> "_CoresetLocatorPart":
        """Corruption hook: same part with one locator pair removed."""
        clone = object.__new__(_CoresetLocatorPart)
        clone.rows = self.rows
        clone.space = self.space
        clone.local = self.local
        clone.coreset_size = self.coreset_size - 1
        clone.input_pairs = self.input_pairs
        keep = np.ones(self.locator.size, dtype=bool)
        keep[t] = False
        clone.locator = PairLocator(
            self.local,
            self.locator.norm,
            self.space,
            self.locator.pair_array[keep],
            self.locator.weights[keep],
        )
        return clone


class _DominancePart:
    """Quadrant/two-box sub-index: diagonal-pair coreset plus the nearest
    differently-colored dominating neighbor of every point."""

    def __init__(self, dataset, norm, eps, rows, signs, axes=(0, 1), d=2):
        self.rows = np.asarray(rows, dtype=np.int64)
        self.signs = signs
        self.axes = axes
        self.local = Dataset(dataset.coords[self.rows], dataset.colors[self.rows])
        self.space = (
            QuadrantSpace(signs) if d == 2 else TwoBoxSpace(d, axes, signs)
        )
        self.pi2_count = 0
        self.coreset_size = 0
        self.locator = None
        if self.local.n < 2 or self.local.is_monochromatic():
            return
        arr = pairs_for_space(self.local, self.space)
        res = build_coreset(self.local, norm, arr, self.space, eps, validate="off")
        self.coreset_size = res.size()
        proj = self.local.coords[:, list(axes)] * np.asarray(signs, dtype=np.float64)
        nn = K.nn_dominating(
            np.ascontiguousarray(proj),
            self.local.coords,
            self.local.colors,
            norm.weight_array,
            norm.p,
        )
        src = np.nonzero(nn >= 0)[0]
        pi2 = np.stack(
            [np.minimum(src, nn[src]), np.maximum(src, nn[src])], axis=1
        ).astype(np.int32) if len(src) else np.empty((0, 2), np.int32)
        self.pi2_count = pi2.shape[0]
        assert self.pi2_count <= self.local.n, "per-point neighbor set exceeded n"
        union = (
            np.vstack([res.pair_array, pi2])
            if res.pair_array.size or pi2.size
            else np.empty((0, 2), np.int32)
        )
        self.locator = PairLocator(self.local, norm, self.space, union)

    def query(self, rng: OrthoRange) -> Optional[Cand]:
        if self.locator is None:
            return None
        idx = self.locator.query_index(rng)
        if idx is None:
            return None
        a, b = self.locator.pair_array[idx]
        w = float(self.locator.weights[idx])
        ga, gb = int(self.rows[a]), int(self.rows[b])
        return (w, min(ga, gb), max(ga, gb))

    def node_count(self) -> int:
        if self.locator is None:
            return 0
        return self.coreset_size + self.pi2_count + self.locator.node_count()


def _finish(dataset, norm, cand: Optional[Cand]) -> Optional[PointPair]:
    if cand is None:
        return None
    return make_pair(dataset, norm, cand[1], cand[2])


class StripIndex:
    """Approximate CRCP index for vertical and horizontal strips."""

    kind = "strip"

    def __init__(self, dataset: Dataset, norm: MonotoneNorm, eps: float, orientations=(0, 1)):
        if dataset.dim != 2:
            raise UsageError("strip index is 2D")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        rows = np.arange(dataset.n)
        self.parts = {
            axis: _CoresetLocatorPart(dataset, norm, eps, rows, StripSpace(axis))
            for axis in orientations
        }

    def query(self, rng: OrthoRange) -> Optional[PointPair]:
        if not isinstance(rng, Strip) or rng.axis not in self.parts:
            raise UsageError(f"strip index cannot answer {rng!r}")
        return _finish(self.dataset, self.norm, self.parts[rng.axis].query(rng))

    def stats(self) -> Dict[str, int]:
        out = {}
        for axis, part in self.parts.items():
            name = "v" if axis == 0 else "h"
            out[f"coreset.{name}"] = part.coreset_size
            out[f"locator.{name}"] = part.locator.node_count()
        out["total"] = sum(p.node_count() for p in self.parts.values())
        return out

    def corrupted_copy_for_test(self) -> "StripIndex":
        """Drop one vertical-part pair whose strip contains no other pair."""
        part = self.parts[0]
        arr = part.locator.pair_array
        if not arr.size:
            raise UsageError("nothing to corrupt")
        coords = part.local.coords[:, 0]
        lo = np.minimum(coords[arr[:, 0]], coords[arr[:, 1]])
        hi = np.maximum(coords[arr[:, 0]], coords[arr[:, 1]])
        victim = None
        for t in np.argsort(hi - lo):
            inside = (lo >= lo[t]) & (hi <= hi[t])
            if inside.sum() == 1:
                victim = int(t)
                break
        if victim is None:
            raise UsageError("no uniquely answering pair to corrupt")
        clone = object.__new__(StripIndex)
        clone.dataset = self.dataset
        clone.norm = self.norm
        clone.eps = self.eps
        clone.parts = dict(self.parts)
        clone.parts[0] = part.drop_pair_for_test(victim)
        return clone


class QuadrantIndex:
    """Approximate CRCP index for all four quadrant orientations."""

    kind = "quadrant"

    _ALL = ((1, 1), (-1, 1), (-1, -1), (1, -1))

    def __init__(self, dataset, norm, eps, orientations=_ALL):
        if dataset.dim != 2:
            raise UsageError("quadrant index is 2D")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        rows = np.arange(dataset.n)
        self.parts = {
            signs: _DominancePart(dataset, norm, eps, rows, signs)
            for signs in orientations
        }

    def query(self, rng: OrthoRange) -> Optional[PointPair]:
        if not isinstance(rng, Quadrant) or rng.signs not in self.parts:
            raise UsageError(f"quadrant index cannot answer {rng!r}")
        return _finish(self.dataset, self.norm, self.parts[rng.signs].query(rng))

    def pi2_sizes(self) -> Dict[Tuple[int, int], int]:
        return {signs: part.pi2_count for signs, part in self.parts.items()}

    def stats(self) -> Dict[str, int]:
        out = {}
        names = {(1, 1): "ne", (-1, 1): "nw", (-1, -1): "sw", (1, -1): "se"}
        for signs, part in self.parts.items():
            out[f"coreset.{names[signs]}"] = part.coreset_size
            out[f"pi2.{names[signs]}"] = part.pi2_count
        out["total"] = sum(p.node_count() for p in self.parts.values())
        return out


class SlabIndex:
    """Approximate CRCP index for axis-aligned slabs in R^3."""

    kind = "slab"

    def __init__(self, dataset, norm, eps):
        if dataset.dim != 3:
            raise UsageError("slab index is 3D")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        rows = np.arange(dataset.n)
        self.parts = {
            axis: _CoresetLocatorPart(dataset, norm, eps, rows, SlabSpace(3, axis))
            for axis in (0, 1, 2)
        }

    def query(self, rng: OrthoRange) -> Optional[PointPair]:
        if not isinstance(rng, Slab) or rng.dim != 3:
            raise UsageError(f"slab index cannot answer {rng!r}")
        return _finish(self.dataset, self.norm, self.parts[rng.axis].query(rng))

    def stats(self) -> Dict[str, int]:
        out = {f"coreset.axis{a}": p.coreset_size for a, p in self.parts.items()}
        out["total"] = sum(p.node_count() for p in self.parts.values())
        return out


class TwoBoxIndex:
    """Approximate CRCP index for two-boxes of configured axis pairs/signs."""

    kind = "2box"

    DEFAULT_CONFIGS = (((1, 2), (1, 1)), ((0, 2), (1, 1)), ((0, 1), (1, 1)))

    def __init__(self, dataset, norm, eps, configs=DEFAULT_CONFIGS):
        if dataset.dim != 3:
            raise UsageError("two-box index is 3D")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        rows = np.arange(dataset.n)
        self.parts = {
            (axes, signs): _DominancePart(dataset, norm, eps, rows, signs, axes, d=3)
            for axes, signs in configs
        }

    def query(self, rng: OrthoRange) -> Optional[PointPair]:
        key = (getattr(rng, "axes", None), getattr(rng, "signs", None))
        if not isinstance(rng, TwoBox) or key not in self.parts:
            raise UsageError(f"two-box index cannot answer {rng!r}")
        return _finish(self.dataset, self.norm, self.parts[key].query(rng))

    def pi2_sizes(self) -> Dict:
        return {key: part.pi2_count for key, part in self.parts.items()}

    def stats(self) -> Dict[str, int]:
        out = {}
        for (axes, signs), part in self.parts.items():
            out[f"coreset.{axes[0]}{axes[1]}"] = part.coreset_size
            out[f"pi2.{axes[0]}{axes[1]}"] = part.pi2_count
        out["total"] = sum(p.node_count() for p in self.parts.values())
        return out


class _SecondaryTree:
    """Secondary y-tree of one internal primary node, with the four
    corner-region sub-indexes at every internal secondary node."""

    def __init__(self, dataset, norm, eps, primary_node):
        east = np.zeros(dataset.n, dtype=bool)
        east[primary_node.right.rows()] = True
        rows = primary_node.rows()

        def payload(v):
            if v.is_leaf or v.size < 2:
                return None
            north = v.right.rows()
            south = v.left.rows()
            quarters = {
                "ne": (north[east[north]], (-1, -1)),
                "nw": (north[~east[north]], (1, -1)),
                "sw": (south[~east[south]], (1, 1)),
                "se": (south[east[south]], (-1, 1)),
            }
            parts = {}
            for name, (qrows, signs) in quarters.items():
                if len(qrows) < 2:
                    parts[name] = None
                    continue
                part = _DominancePart(dataset, norm, eps, qrows, signs)
                parts[name] = part if part.locator is not None else None
            return parts

        self.tree = RangeTree1D(dataset.coords[rows, 1], rows, payload)

    def node_count(self) -> int:
        total = len(self.tree.nodes)
        for node in self.tree.nodes:
            if node.payload:
                total += sum(p.node_count() for p in node.payload.values() if p)
        return total


class RectIndexV1:
    """Rectangle CRCP index: 2D range tree with corner-region sub-indexes,
    two strip-carrying 1D trees, and an anchored index."""

    kind = "rect1"

    def __init__(self, dataset, norm, eps):
        if dataset.dim != 2:
            raise UsageError("rectangle index is 2D")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        ids = np.arange(dataset.n)
        self.primary = RangeTree1D(
            dataset.coords[:, 0],
            ids,
            lambda u: _SecondaryTree(dataset, norm, eps, u) if not u.is_leaf else None,
        )
        self.tx = RangeTree1D(
            dataset.coords[:, 0],
            ids,
            lambda u: _CoresetLocatorPart(dataset, norm, eps, u.rows(), StripSpace(1)),
        )
        self.ty = RangeTree1D(
            dataset.coords[:, 1],
            ids,
            lambda u: _CoresetLocatorPart(dataset, norm, eps, u.rows(), StripSpace(0)),
        )
        self.anchored = AnchoredIndex2D(dataset, norm, eps)

    def _strip_candidates(self, rect: Rect, debug=None):
        cands = []
        xs_nodes = self.tx.canonical_nodes(rect.lo[0], rect.hi[0])
        for node in xs_nodes:
            hit = node.payload.query(Strip(1, rect.lo[1], rect.hi[1]))
            if hit:
                cands.append(hit)
        ys_nodes = self.ty.canonical_nodes(rect.lo[1], rect.hi[1])
        for node in ys_nodes:
            hit = node.payload.query(Strip(0, rect.lo[0], rect.hi[0]))
            if hit:
                cands.append(hit)
        xs = RangeTree1D.separators(xs_nodes)
        ys = RangeTree1D.separators(ys_nodes)
        if debug is not None:
            debug["x_canonical"] = [list(map(int, n.rows())) for n in xs_nodes]
            debug["y_canonical"] = [list(map(int, n.rows())) for n in ys_nodes]
        return cands, xs, ys

    def query(self, rng: OrthoRange, debug=None) -> Optional[PointPair]:
        if not isinstance(rng, Rect):
            raise UsageError(f"rectangle index cannot answer {rng!r}")
        cands, xs, ys = self._strip_candidates(rng, debug)
        anchors = []
        u = self.primary.splitting_node(rng.lo[0], rng.hi[0])
        if u is not None and not u.is_leaf:
            sec = u.payload.tree
            v = sec.splitting_node(rng.lo[1], rng.hi[1])
            if v is not None and not v.is_leaf:
                lu = u.separator()
                lv = v.separator()
                parts = v.payload
                corners = {
                    "ne": Quadrant((-1, -1), (rng.hi[0], rng.hi[1])),
                    "nw": Quadrant((1, -1), (rng.lo[0], rng.hi[1])),
                    "sw": Quadrant((1, 1), (rng.lo[0], rng.lo[1])),
                    "se": Quadrant((-1, 1), (rng.hi[0], rng.lo[1])),
                }
                for name, quad in corners.items():
                    part = parts[name] if parts else None
                    if part is not None:
                        hit = part.query(quad)
                        if hit:
                            cands.append(hit)
                anchors = [(xi, lv) for xi in xs] + [(lu, yi) for yi in ys]
                if debug is not None:
                    debug["splitting_rows"] = list(map(int, v.rows()))
        for o in anchors:
            hit = self.anchored.query(rng, o)
            if hit:
                cands.append((hit.length, hit.a, hit.b))
        if debug is not None:
            debug["anchors"] = anchors
        return _finish(self.dataset, self.norm, _best(cands))

    def stats(self) -> Dict[str, int]:
        tree_total = len(self.primary.nodes)
        for node in self.primary.nodes:
            if node.payload is not None:
                tree_total += node.payload.node_count()
        tx_total = len(self.tx.nodes) + sum(n.payload.node_count() for n in self.tx.nodes)
        ty_total = len(self.ty.nodes) + sum(n.payload.node_count() for n in self.ty.nodes)
        anch = self.anchored.node_count()
        return {
            "tree2d": tree_total,
            "strips.x": tx_total,
            "strips.y": ty_total,
            "anchored": anch,
            "total": tree_total + tx_total + ty_total + anch,
        }


class RectIndexV2:
    """Rectangle CRCP index without the 2D tree; anchors on a separator grid."""

    kind = "rect2"

    def __init__(self, dataset, norm, eps):
        if dataset.dim != 2:
            raise UsageError("rectangle index is 2D")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        ids = np.arange(dataset.n)
        self.tx = RangeTree1D(
            dataset.coords[:, 0],
            ids,
            lambda u: _CoresetLocatorPart(dataset, norm, eps, u.rows(), StripSpace(1)),
        )
        self.ty = RangeTree1D(
            dataset.coords[:, 1],
            ids,
            lambda u: _CoresetLocatorPart(dataset, norm, eps, u.rows(), StripSpace(0)),
        )
        self.anchored = AnchoredIndex2D(dataset, norm, eps)

    def query(self, rng: OrthoRange, debug=None) -> Optional[PointPair]:
        if not isinstance(rng, Rect):
            raise UsageError(f"rectangle index cannot answer {rng!r}")
        cands = []
        xs_nodes = self.tx.canonical_nodes(rng.lo[0], rng.hi[0])
        for node in xs_nodes:
            hit = node.payload.query(Strip(1, rng.lo[1], rng.hi[1]))
            if hit:
                cands.append(hit)
        ys_nodes = self.ty.canonical_nodes(rng.lo[1], rng.hi[1])
        for node in ys_nodes:
            hit = node.payload.query(Strip(0, rng.lo[0], rng.hi[0]))
            if hit:
                cands.append(hit)
        xs = RangeTree1D.separators(xs_nodes)
        ys = RangeTree1D.separators(ys_nodes)
        anchors = [(xi, yj) for xi in xs for yj in ys]
        for o in anchors:
            hit = self.anchored.query(rng, o)
            if hit:
                cands.append((hit.length, hit.a, hit.b))
        if debug is not None:
            debug["anchors"] = anchors
            debug["x_canonical"] = [list(map(int, n.rows())) for n in xs_nodes]
            debug["y_canonical"] = [list(map(int, n.rows())) for n in ys_nodes]
        return _finish(self.dataset, self.norm, _best(cands))

    def stats(self) -> Dict[str, int]:
        tx_total = len(self.tx.nodes) + sum(n.payload.node_count() for n in self.tx.nodes)
        ty_total = len(self.ty.nodes) + sum(n.payload.node_count() for n in self.ty.nodes)
        anch = self.anchored.node_count()
        return {
            "strips.x": tx_total,
            "strips.y": ty_total,
            "anchored": anch,
            "total": tx_total + ty_total + anch,
        }


class Dominance3Index:
    """3D dominance CRCP index: three trees of two-box sub-indexes plus a
    3D anchored index queried on the separator grid."""

    kind = "dom3"

    _AXES = {0: (1, 2), 1: (0, 2), 2: (0, 1)}

    def __init__(self, dataset, norm, eps):
        if dataset.dim != 3:
            raise UsageError("dominance index is 3D")
        self.dataset = dataset
        self.norm = norm
        self.eps = eps
        ids = np.arange(dataset.n)
        self.trees = {}
        for axis, other in self._AXES.items():
            self.trees[axis] = RangeTree1D(
                dataset.coords[:, axis],
                ids,
                lambda u, o=other: _DominancePart(
                    dataset, norm, eps, u.rows(), (1, 1), o, d=3
                ),
            )
        self.anchored = AnchoredIndex3D(dataset, norm, eps)

    def query(self, rng: OrthoRange, debug=None) -> Optional[PointPair]:
        if not isinstance(rng, Dominance3):
            raise UsageError(f"dominance index cannot answer {rng!r}")
        corner = rng.corner
        cands = []
        seps = {}
        for axis, other in self._AXES.items():
            nodes = self.trees[axis].canonical_nodes(corner[axis], math.inf)
            box_corner = (corner[other[0]], corner[other[1]])
            for node in nodes:
                hit = node.payload.query(TwoBox(3, other, (1, 1), box_corner))
                if hit:
                    cands.append(hit)
            seps[axis] = RangeTree1D.separators(nodes)
        box = Box3([corner[0], math.inf, corner[1], math.inf, corner[2], math.inf])
        anchors = [
            (xi, yj, zk)
            for xi in seps[0]
            for yj in seps[1]
            for zk in seps[2]
        ]
        for o in anchors:
            hit = self.anchored.query(box, o)
            if hit:
                cands.append((hit.length, hit.a, hit.b))
        if debug is not None:
            debug["anchors"] = anchors
        return _finish(self.dataset, self.norm, _best(cands))

    def pi2_sizes(self) -> List[int]:
        out = []
        for tree in self.trees.values():
            out.extend(n.payload.pi2_count for n in tree.nodes if n.payload)
        return out

    def stats(self) -> Dict[str, int]:
        out = {}
        total = 0
        for axis, tree in self.trees.items():
            sub = len(tree.nodes) + sum(
                n.payload.node_count() for n in tree.nodes if n.payload
            )
            out[f"tree.axis{axis}"] = sub
            total += sub
        out["anchored"] = self.anchored.node_count()
        out["total"] = total + out["anchored"]
        return out


INDEX_KINDS = ("strip", "quadrant", "rect1", "rect2", "slab", "2box", "dom3")


def build_index(kind: str, dataset: Dataset, norm: MonotoneNorm, eps: float):
    """Factory over every composed index kind."""
    builders = {
        "strip": StripIndex,
        "quadrant": QuadrantIndex,
        "rect1": RectIndexV1,
        "rect2": RectIndexV2,
        "slab": SlabIndex,
        "2box": TwoBoxIndex,
        "dom3": Dominance3Index,
        "anchored2d": AnchoredIndex2D,
        "anchored3d": AnchoredIndex3D,
    }
    if kind not in builders:
        raise UsageError(f"unknown index kind {kind!r}")
    return builders[kind](dataset, norm, eps)

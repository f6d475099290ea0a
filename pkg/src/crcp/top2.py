"""Top-2 store: lightest point and lightest differently-colored point inside
any intersection of translates of c fixed halfplanes/halfspaces.

A store is a nested range-tree cascade on the direction scalars with a
rotated-coordinate dominance structure at the two innermost directions;
subsets of at most ``t0`` points become scan buckets.  Stores that share
their point set and direction count (a *family*, e.g. the per-sector stores
of an anchored index) share one structural template; contents are rows of
pooled arrays filled by one compiled pass.  Fractional-cascading bridge
positions are always built; queries can take them or plain binary search,
and both paths return identical answers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import _kernels as K
from .errors import UsageError

__all__ = ["Top2Answer", "Top2Family", "Top2Store", "build_top2", "query_top2"]

DEFAULT_BUCKET = 8

_KIND_BUCKET = K.KIND_BUCKET
_KIND_BASE = K.KIND_BASE
_KIND_INTERNAL = K.KIND_INTERNAL


class _Template:
    """Structural layout shared by every store of a (n, c, t0) family."""

    def __init__(self, n: int, c: int, t0: int):
        self.n = n
        self.c = c
        self.t0 = t0
        s_kind: List[int] = []
        s_level: List[int] = []
        s_off: List[int] = []
        s_size: List[int] = []
        s_src_struct: List[int] = []
        s_src_lo: List[int] = []
        s_node_base: List[int] = []
        s_node_count: List[int] = []
        n_rel_lo: List[int] = []
        n_rel_hi: List[int] = []
        n_left: List[int] = []
        n_right: List[int] = []
        n_ent_off: List[int] = []
        n_bri_off: List[int] = []
        cursors = {"order": 0, "entry": 0, "bridge": 0}

        def add_struct(level, src_struct, src_lo, size):
            sid = len(s_kind)
            s_level.append(level)
            s_off.append(cursors["order"])
            s_size.append(size)
            s_src_struct.append(src_struct)
            s_src_lo.append(src_lo)
            s_node_base.append(len(n_rel_lo))
            s_node_count.append(0)
            cursors["order"] += size
            if size <= t0 or level < 2:
                s_kind.append(_KIND_BUCKET)
                return sid
            if level == 2:
                s_kind.append(_KIND_BASE)

                def base_node(lo, hi):
                    nid = len(n_rel_lo)
                    n_rel_lo.append(lo)
                    n_rel_hi.append(hi)
                    n_left.append(-1)
                    n_right.append(-1)
                    n_ent_off.append(cursors["entry"])
                    cursors["entry"] += hi - lo
                    if hi - lo > t0:
                        n_bri_off.append(cursors["bridge"])
                        cursors["bridge"] += hi - lo + 1
                        mid = (lo + hi) // 2
                        n_left[nid] = base_node(lo, mid)
                        n_right[nid] = base_node(mid, hi)
                    else:
                        n_bri_off.append(-1)
                    return nid

                base_node(0, size)
                s_node_count[sid] = len(n_rel_lo) - s_node_base[sid]
                return sid
            s_kind.append(_KIND_INTERNAL)
            pending = []  # (node id, lo, hi) needing a child struct

            def int_node(lo, hi):
                nid = len(n_rel_lo)
                n_rel_lo.append(lo)
                n_rel_hi.append(hi)
                n_left.append(-1)
                n_right.append(-1)
                n_ent_off.append(-1)  # becomes the child struct id
                n_bri_off.append(-1)
                if hi - lo > t0:
                    pending.append((nid, lo, hi))
                    mid = (lo + hi) // 2
                    n_left[nid] = int_node(lo, mid)
                    n_right[nid] = int_node(mid, hi)
                return nid

            int_node(0, size)
            s_node_count[sid] = len(n_rel_lo) - s_node_base[sid]
            # child structs are created after this struct's nodes so every
            # struct's node rows stay contiguous and ids stay topological
            for nid, lo, hi in pending:
                n_ent_off[nid] = add_struct(level - 1, sid, s_off[sid] + lo, hi - lo)
            return sid

        add_struct(c, -1, 0, n)
        as_i32 = lambda xs: np.asarray(xs, dtype=np.int32)
        self.s_kind = as_i32(s_kind)
        self.s_level = as_i32(s_level)
        self.s_off = as_i32(s_off)
        self.s_size = as_i32(s_size)
        self.s_src_struct = as_i32(s_src_struct)
        self.s_src_lo = as_i32(s_src_lo)
        self.s_src_hi = as_i32([lo + sz for lo, sz in zip(s_src_lo, s_size)])
        self.s_node_base = as_i32(s_node_base)
        self.s_node_count = as_i32(s_node_count)
        self.n_rel_lo = as_i32(n_rel_lo)
        self.n_rel_hi = as_i32(n_rel_hi)
        self.n_left = as_i32(n_left)
        self.n_right = as_i32(n_right)
        self.n_ent_off = as_i32(n_ent_off)
        self.n_bri_off = as_i32(n_bri_off)
        self.order_len = cursors["order"]
        self.entry_len = cursors["entry"]
        self.bridge_len = cursors["bridge"]
        self.node_rows = len(n_rel_lo)


_TEMPLATES: dict = {}


def _get_template(n: int, c: int, t0: int) -> _Template:
    key = (n, c, t0)
    tmpl = _TEMPLATES.get(key)
    if tmpl is None:
        tmpl = _Template(n, c, t0)
        _TEMPLATES[key] = tmpl
    return tmpl


@dataclass(frozen=True)
class Top2Answer:
    """Lightest in-range point and lightest one of a different color."""

    first: Optional[int]
    second: Optional[int]


class Top2Family:
    """Stores over one weighted colored point set, one per direction tuple."""

    def __init__(self, coords, weights, colors, directions, t0: int = DEFAULT_BUCKET):
        coords = np.ascontiguousarray(coords, dtype=np.float64)
        dirs = np.ascontiguousarray(directions, dtype=np.float64)
        if dirs.ndim != 3:
            raise UsageError("directions must have shape (stores, c, d)")
        S, c, d = dirs.shape
        if not 2 <= c <= 7:
            raise UsageError("direction count must be between 2 and 7")
        if coords.ndim != 2 or coords.shape[1] != d:
            raise UsageError("coords must have shape (n, d) matching directions")
        if S and (np.abs(dirs).sum(axis=2) == 0).any():
            raise UsageError("directions must be nonzero")
        n = coords.shape[0]
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.colors = np.ascontiguousarray(colors, dtype=np.int32)
        if self.weights.shape != (n,) or self.colors.shape != (n,):
            raise UsageError("weights/colors must align with coords")
        if n and not np.isfinite(self.weights).all():
            raise UsageError("weights must be finite")
        self.n = n
        self.num_stores = S
        self.c = c
        self.dirs = dirs
        self.t0 = t0
        # scalar matrix shared by build, query, and the scan oracle
        self.scal3 = np.einsum("nd,scd->snc", coords, dirs) if n and S else np.zeros((S, n, c))
        self.scal3 = np.ascontiguousarray(self.scal3)
        self.template = _get_template(n, c, t0)
        tm = self.template
        self._order = np.zeros((S, tm.order_len), dtype=np.int32)
        self._entp = np.zeros((S, tm.entry_len), dtype=np.int32)
        self._t2f = np.full((S, tm.entry_len), -1, dtype=np.int32)
        self._t2s = np.full((S, tm.entry_len), -1, dtype=np.int32)
        self._briL = np.zeros((S, tm.bridge_len), dtype=np.int32)
        self._briR = np.zeros((S, tm.bridge_len), dtype=np.int32)
        if n and S:
            K.top2_build_family(
                self.scal3,
                t0,
                tm.s_kind,
                tm.s_level,
                tm.s_off,
                tm.s_size,
                tm.s_src_struct,
                tm.s_src_lo,
                tm.s_src_hi,
                tm.s_node_base,
                tm.s_node_count,
                tm.n_rel_lo,
                tm.n_rel_hi,
                tm.n_left,
                tm.n_right,
                tm.n_ent_off,
                tm.n_bri_off,
                self._order,
                self._entp,
                self._t2f,
                self._t2s,
                self._briL,
                self._briR,
                self.weights,
                self.colors,
            )

    def query(self, store: int, offsets, use_cascading: bool = True) -> Top2Answer:
        """Top-2 over points p with dirs[store][k] . p >= offsets[k] for all k."""
        mus = np.ascontiguousarray(offsets, dtype=np.float64)
        if mus.shape != (self.c,):
            raise UsageError("offsets must supply one threshold per direction")
        if self.n == 0:
            return Top2Answer(None, None)
        tm = self.template
        f, s = K.top2_query_store(
            self.scal3[store],
            mus,
            use_cascading,
            tm.s_kind,
            tm.s_level,
            tm.s_off,
            tm.s_size,
            tm.s_node_base,
            tm.s_node_count,
            tm.n_rel_lo,
            tm.n_rel_hi,
            tm.n_left,
            tm.n_right,
            tm.n_ent_off,
            tm.n_bri_off,
            self._order[store],
            self._entp[store],
            self._t2f[store],
            self._t2s[store],
            self._briL[store],
            self._briR[store],
            self.weights,
            self.colors,
        )
        return Top2Answer(None if f < 0 else int(f), None if s < 0 else int(s))

    def scan(self, store: int, offsets) -> Top2Answer:
        """Linear-scan oracle over the same scalar matrix and tie-break."""
        mus = np.ascontiguousarray(offsets, dtype=np.float64)
        if self.n == 0:
            return Top2Answer(None, None)
        rows = np.arange(self.n, dtype=np.int64)
        f, s = K.top2_scan_rows(self.scal3[store], self.weights, self.colors, mus, rows)
        return Top2Answer(None if f < 0 else int(f), None if s < 0 else int(s))

    def node_count(self) -> int:
        tm = self.template
        per_store = tm.node_rows + tm.order_len + 2 * tm.entry_len
        return self.num_stores * per_store


class Top2Store:
    """A single top-2 store (a family of one)."""

    def __init__(self, coords, weights, colors, directions, t0: int = DEFAULT_BUCKET):
        dirs = np.ascontiguousarray(directions, dtype=np.float64)
        if dirs.ndim != 2:
            raise UsageError("directions must have shape (c, d)")
        self.family = Top2Family(coords, weights, colors, dirs[None, :, :], t0)

    def query(self, offsets, use_cascading: bool = True) -> Top2Answer:
        return self.family.query(0, offsets, use_cascading)

    def scan(self, offsets) -> Top2Answer:
        return self.family.scan(0, offsets)

    def node_count(self) -> int:
        return self.family.node_count()


def build_top2(coords, weights, colors, directions, t0: int = DEFAULT_BUCKET) -> Top2Store:
    return Top2Store(coords, weights, colors, directions, t0)


def query_top2(store: Top2Store, offsets, use_cascading: bool = True) -> Top2Answer:
    return store.query(offsets, use_cascading)


def merge_answers(answers: Sequence[Top2Answer], weights, colors) -> Top2Answer:
    """Fold partial answers; used by the decomposability property tests."""
    f = -1
    s = -1
    for ans in answers:
        for r in (ans.first, ans.second):
            if r is None:
                continue
            f, s = K._merge_cand(f, s, r, weights, colors)
    return Top2Answer(None if f < 0 else int(f), None if s < 0 else int(s))

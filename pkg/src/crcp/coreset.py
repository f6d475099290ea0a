"""Greedy coresets of pair sets for well-behaved query spaces.

The construction repeatedly selects a minimal range of the space that still
contains a remaining pair, keeps the closest contained pair unless the
current coreset already answers that range within the approximation factor,
and removes it.  Minimal ranges are visited in a fixed linear extension of
range containment (strictly smaller ranges first), which yields the same
kept set as any other minimal-selection order; containment queries against
the kept set run on a dense 2D Fenwick tree over coordinate ranks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .errors import UsageError
from .geometry import Dataset, MonotoneNorm, PointPair, make_pair, strongly_adjacent
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
    check_well_behaved,
    range_subseteq,
)

__all__ = [
    "CoresetResult",
    "TraceStep",
    "bichromatic_pairs",
    "pairs_for_space",
    "build_coreset",
    "select_minimal",
    "verify_coreset",
    "kept_pair_gap_violations",
    "measure_size_growth",
    "GrowthRow",
    "save_coreset",
    "load_coreset",
]

FULL_CHECK_CAP = 600  # pair count up to which the O(m^2) check runs by default
DEFAULT_MAX_PAIRS = 4_000_000


@dataclass(frozen=True)
class TraceStep:
    rng: OrthoRange
    pair_index: int
    kept: bool


@dataclass
class CoresetResult:
    """Kept pairs plus the full keep/skip log of the construction.

    The trace (one step per input pair, in processing order) is materialized
    lazily; large composed builds never touch it.
    """

    pairs: List[PointPair]
    kept_indices: np.ndarray
    ground_size: int
    eps: float
    pair_array: np.ndarray
    lengths: np.ndarray
    _order: np.ndarray = field(default=None, repr=False)
    _kept_mask: np.ndarray = field(default=None, repr=False)
    _range_factory: object = field(default=None, repr=False)
    _trace: Optional[List[TraceStep]] = field(default=None, repr=False)

    def size(self) -> int:
        return len(self.pairs)

    @property
    def trace(self) -> List[TraceStep]:
        if self._trace is None:
            steps = []
            if self._order is not None:
                for t in range(len(self._order)):
                    e = int(self._order[t])
                    steps.append(
                        TraceStep(self._range_factory(e), e, bool(self._kept_mask[t]))
                    )
            self._trace = steps
        return self._trace


def bichromatic_pairs(dataset: Dataset) -> np.ndarray:
    """All bichromatic pairs (a < b), ordered lexicographically."""
    return K.bich_pairs(dataset.colors)


def _as_pair_array(dataset: Dataset, pairs) -> np.ndarray:
    if isinstance(pairs, np.ndarray):
        arr = np.ascontiguousarray(pairs, dtype=np.int32)
    else:
        arr = np.array([[p.a, p.b] for p in pairs], dtype=np.int32).reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= dataset.n):
        raise UsageError("pair indices out of range")
    return arr


def _space_keys(space, dataset: Dataset, arr: np.ndarray):
    """Per-pair 2D keys, group ordering keys, and the range reconstructor.

    Keys are prefix-normalized ranks: a kept pair is contained in the
    query's smallest range iff both ranks are <= the query pair's ranks.
    """
    coords = dataset.coords
    a = arr[:, 0]
    b = arr[:, 1]
    if isinstance(space, (StripSpace, SlabSpace)):
        axis = space.axis
        va = coords[a, axis]
        vb = coords[b, axis]
        lo = np.minimum(va, vb)
        hi = np.maximum(va, vb)
        dlo, rlo = np.unique(lo, return_inverse=True)
        dhi, rhi = np.unique(hi, return_inverse=True)
        pu = (len(dlo) - 1 - rlo).astype(np.int64)  # lo descending
        pv = rhi.astype(np.int64)  # hi ascending
        gk1 = hi - lo
        gk2 = lo

        def make_range(t):
            if isinstance(space, StripSpace):
                return Strip(axis, float(lo[t]), float(hi[t]))
            return Slab(space.d, axis, float(lo[t]), float(hi[t]))

        return pu, pv, len(dlo), len(dhi), gk1, gk2, make_range
    if isinstance(space, (QuadrantSpace, TwoBoxSpace)):
        if isinstance(space, QuadrantSpace):
            axes = (0, 1)
        else:
            axes = space.axes
        s0, s1 = space.signs
        u = s0 * coords[:, axes[0]]
        v = s1 * coords[:, axes[1]]
        orient = K.pair_orient2(coords, arr, axes[0], axes[1], float(s0), float(s1))
        if arr.size and (orient == 0).any():
            bad = int(np.nonzero(orient == 0)[0][0])
            raise UsageError(
                f"{space.describe()} is not well-behaved: pair "
                f"({int(arr[bad,0])},{int(arr[bad,1])}) has the wrong orientation"
            )
        cu = np.minimum(u[a], u[b])
        cv = np.minimum(v[a], v[b])
        du, ru = np.unique(cu, return_inverse=True)
        dv, rv = np.unique(cv, return_inverse=True)
        pu = (len(du) - 1 - ru).astype(np.int64)  # corner u descending
        pv = (len(dv) - 1 - rv).astype(np.int64)
        gk1 = -(cu + cv)
        gk2 = -cu

        def make_range(t):
            corner = (float(s0 * cu[t]), float(s1 * cv[t]))
            if isinstance(space, QuadrantSpace):
                return Quadrant(space.signs, corner)
            return TwoBox(space.d, space.axes, space.signs, corner)

        return pu, pv, len(du), len(dv), gk1, gk2, make_range
    raise UsageError(f"space {space!r} does not support coresets")


def _validate_space(space, dataset, arr, mode):
    if mode == "off":
        return
    if mode == "auto" and arr.shape[0] > FULL_CHECK_CAP:
        return  # orientation is still enforced inside _space_keys
    pairs = [make_pair(dataset, MonotoneNorm(dataset.dim, 2.0), int(a), int(b)) for a, b in arr]
    violation = check_well_behaved(space, dataset, pairs)
    if violation is not None:
        raise UsageError(f"space not well-behaved on input pairs: {violation.reason}")


def build_coreset(
    dataset: Dataset,
    norm: MonotoneNorm,
    pairs,
    space,
    eps: float,
    validate: str = "auto",
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> CoresetResult:
    """Run the greedy procedure and return the kept pairs with their trace.

    ``validate`` is one of ``auto`` (full well-behavedness check up to a
    size cap, orientation check always), ``full``, or ``off``.
    """
    if not eps > 0.0:
        raise UsageError("eps must be strictly positive")
    arr = _as_pair_array(dataset, pairs)
    m = arr.shape[0]
    if m > max_pairs:
        raise UsageError(f"pair set of size {m} exceeds the cap {max_pairs}")
    ground = np.unique(arr) if m else np.empty(0, dtype=np.int32)
    if m == 0:
        return CoresetResult([], np.empty(0, np.int64), 0, eps, arr, np.empty(0))
    _validate_space(space, dataset, arr, validate)
    pu, pv, nu, nv, gk1, gk2, make_range = _space_keys(space, dataset, arr)
    lens = K.pair_lengths(dataset.coords, arr, norm.weight_array, norm.p)
    order = np.lexsort((np.arange(m), lens, gk2, gk1)).astype(np.int64)
    kept = K.coreset_greedy(order, pu, pv, lens, nu, nv, eps)
    kept_idx = order[kept.astype(bool)]
    result_pairs = [
        make_pair(dataset, norm, int(arr[e, 0]), int(arr[e, 1])) for e in kept_idx
    ]
    return CoresetResult(
        pairs=result_pairs,
        kept_indices=kept_idx,
        ground_size=len(ground),
        eps=eps,
        pair_array=arr[kept_idx] if len(kept_idx) else np.empty((0, 2), np.int32),
        lengths=lens[kept_idx] if len(kept_idx) else np.empty(0),
        _order=order,
        _kept_mask=kept,
        _range_factory=make_range,
    )


def select_minimal(dataset: Dataset, pairs: Sequence[PointPair], space) -> PointPair:
    """Reference selection rule: among pairs whose smallest range is minimal
    under containment, the one with the lowest input index wins."""
    if not pairs:
        raise UsageError("need a nonempty pair set")
    ranges = [space.smallest(dataset, p) for p in pairs]
    for i, ri in enumerate(ranges):
        minimal = True
        for j, rj in enumerate(ranges):
            if i != j and range_subseteq(rj, ri) and not range_subseteq(ri, rj):
                minimal = False
                break
        if minimal:
            return pairs[i]
    raise AssertionError("finite range family must have a minimal element")


def verify_coreset(
    dataset: Dataset,
    norm: MonotoneNorm,
    pairs,
    kept,
    space,
    eps: float,
    method: str = "tables",
) -> Optional[OrthoRange]:
    """Check the coreset definition over every canonical range.

    Returns the first violating range, or ``None``.  ``method`` selects the
    dynamic-programming tables or the independent per-range linear scan.
    """
    arr = _as_pair_array(dataset, pairs)
    krr = _as_pair_array(dataset, kept)
    if krr.size:
        full = {(int(a), int(b)) for a, b in arr}
        for a, b in krr:
            if (int(a), int(b)) not in full:
                raise UsageError("kept pairs must be a subset of the input pairs")
    m = arr.shape[0]
    if m == 0:
        return None
    w = norm.weight_array
    lens = K.pair_lengths(dataset.coords, arr, w, norm.p)
    klens = K.pair_lengths(dataset.coords, krr, w, norm.p) if krr.size else np.empty(0)
    coords = dataset.coords
    if isinstance(space, (StripSpace, SlabSpace)):
        axis = space.axis
        ground = np.unique(arr)
        vals = np.unique(coords[ground, axis])
        nc = len(vals)
        plo = np.searchsorted(vals, np.minimum(coords[arr[:, 0], axis], coords[arr[:, 1], axis]))
        phi = np.searchsorted(vals, np.maximum(coords[arr[:, 0], axis], coords[arr[:, 1], axis]))
        if krr.size:
            klo = np.searchsorted(vals, np.minimum(coords[krr[:, 0], axis], coords[krr[:, 1], axis]))
            khi = np.searchsorted(vals, np.maximum(coords[krr[:, 0], axis], coords[krr[:, 1], axis]))
        else:
            klo = np.empty(0, np.int64)
            khi = np.empty(0, np.int64)

        def mk(i, j):
            if isinstance(space, StripSpace):
                return Strip(axis, float(vals[i]), float(vals[j]))
            return Slab(space.d, axis, float(vals[i]), float(vals[j]))

        if method == "tables":
            TF = K.pair_min_window_tables(plo, phi, lens, nc)
            TK = K.pair_min_window_tables(klo, khi, klens, nc)
            for i in range(nc):
                for j in range(i, nc):
                    full_min = TF[i, j]
                    if full_min == np.inf:
                        continue
                    kept_min = TK[i, j]
                    if kept_min == np.inf or kept_min > (1.0 + eps) * full_min:
                        return mk(i, j)
            return None
        for i in range(nc):
            for j in range(i, nc):
                full_min = K.min_len_window_scan(plo, phi, lens, i, j)
                if full_min == np.inf:
                    continue
                kept_min = K.min_len_window_scan(klo, khi, klens, i, j)
                if kept_min == np.inf or kept_min > (1.0 + eps) * full_min:
                    return mk(i, j)
        return None
    if isinstance(space, (QuadrantSpace, TwoBoxSpace)):
        axes = (0, 1) if isinstance(space, QuadrantSpace) else space.axes
        s0, s1 = space.signs
        ground = np.unique(arr)
        du = np.unique(s0 * coords[ground, axes[0]])
        dv = np.unique(s1 * coords[ground, axes[1]])

        def corner_ranks(parr):
            u = s0 * coords[:, axes[0]]
            v = s1 * coords[:, axes[1]]
            cu = np.minimum(u[parr[:, 0]], u[parr[:, 1]])
            cv = np.minimum(v[parr[:, 0]], v[parr[:, 1]])
            return np.searchsorted(du, cu), np.searchsorted(dv, cv)

        pcx, pcy = corner_ranks(arr)
        if krr.size:
            kcx, kcy = corner_ranks(krr)
        else:
            kcx = np.empty(0, np.int64)
            kcy = np.empty(0, np.int64)

        def mk(i, j):
            corner = (float(s0 * du[i]), float(s1 * dv[j]))
            if isinstance(space, QuadrantSpace):
                return Quadrant(space.signs, corner)
            return TwoBox(space.d, space.axes, space.signs, corner)

        if method == "tables":
            TF = K.pair_min_corner_tables(pcx, pcy, lens, len(du), len(dv))
            TK = K.pair_min_corner_tables(kcx, kcy, klens, len(du), len(dv))
            for i in range(len(du)):
                for j in range(len(dv)):
                    full_min = TF[i, j]
                    if full_min == np.inf:
                        continue
                    kept_min = TK[i, j]
                    if kept_min == np.inf or kept_min > (1.0 + eps) * full_min:
                        return mk(i, j)
            return None
        for i in range(len(du)):
            for j in range(len(dv)):
                full_min = K.min_len_corner_scan(pcx, pcy, lens, i, j)
                if full_min == np.inf:
                    continue
                kept_min = K.min_len_corner_scan(kcx, kcy, klens, i, j)
                if kept_min == np.inf or kept_min > (1.0 + eps) * full_min:
                    return mk(i, j)
        return None
    raise UsageError(f"space {space!r} does not support coreset verification")


def kept_pair_gap_violations(
    dataset: Dataset, result: CoresetResult, eps: float
) -> List[Tuple[PointPair, PointPair]]:
    """Strongly adjacent kept pairs must differ in length by more than 1+eps."""
    out = []
    kept = result.pairs
    for i in range(len(kept)):
        for j in range(i + 1, len(kept)):
            if not strongly_adjacent(dataset, kept[i], kept[j]):
                continue
            li = kept[i].length
            lj = kept[j].length
            if not (li > (1.0 + eps) * lj or lj > (1.0 + eps) * li):
                out.append((kept[i], kept[j]))
    return out


def pairs_for_space(dataset: Dataset, space) -> np.ndarray:
    """Bichromatic pairs restricted to the orientation the space requires."""
    arr = bichromatic_pairs(dataset)
    if isinstance(space, (StripSpace, SlabSpace)) or arr.size == 0:
        return arr
    if isinstance(space, QuadrantSpace):
        axes = (0, 1)
    elif isinstance(space, TwoBoxSpace):
        axes = space.axes
    else:
        raise UsageError(f"space {space!r} unsupported")
    s0, s1 = space.signs
    orient = K.pair_orient2(dataset.coords, arr, axes[0], axes[1], float(s0), float(s1))
    return np.ascontiguousarray(arr[orient != 0])


def save_coreset(result: CoresetResult, path) -> None:
    """Dump kept pairs, one `i j length` line per pair (dataset indices)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# coreset size={result.size()} eps={result.eps:g}\n")
        for (a, b), l in zip(result.pair_array, result.lengths):
            fh.write(f"{int(a)} {int(b)} {float(l):.17g}\n")


def load_coreset(path):
    """Read a coreset dump back as (pair array, lengths)."""
    pairs = []
    lens = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            a, b, l = line.split()
            pairs.append((int(a), int(b)))
            lens.append(float(l))
    return (
        np.asarray(pairs, dtype=np.int32).reshape(-1, 2),
        np.asarray(lens, dtype=np.float64),
    )


@dataclass(frozen=True)
class GrowthRow:
    n: int
    eps: float
    mean_size: float
    bound: float
    fitted_c: float


def measure_size_growth(
    space,
    norm: MonotoneNorm,
    eps_list: Sequence[float],
    n_list: Sequence[int],
    trials: int = 3,
    seed: int = 0,
    num_colors: int = 2,
    distribution: str = "uniform-box",
) -> List[GrowthRow]:
    """Coreset sizes against the eps^-1 * n * log^d n bound on random data."""
    from .oracle import gen_random

    d = space.dim
    rows = []
    for n in n_list:
        for eps in eps_list:
            sizes = []
            for t in range(trials):
                ds = gen_random(n, num_colors, distribution, d, seed + 1009 * t + 13 * n)
                arr = pairs_for_space(ds, space)
                res = build_coreset(ds, norm, arr, space, eps, validate="off")
                sizes.append(res.size())
            mean = float(np.mean(sizes)) if sizes else 0.0
            bound = (1.0 / eps) * n * (math.log2(max(n, 2)) ** d)
            rows.append(GrowthRow(n, eps, mean, bound, mean / bound))
    return rows

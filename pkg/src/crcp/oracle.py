"""Ground-truth oracles, dataset generators, and the verification harness.

The brute-force oracles define the exact answers the structures are checked
against.  For canonical query batches (all combinatorially distinct strips,
quadrants, slabs, two-boxes, dominance corners of a dataset) the per-range
scans are replaced by dynamic-programming tables over coordinate ranks,
which agree with the scans and make full sweeps affordable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .errors import UsageError, VerificationError
from .geometry import Dataset, MonotoneNorm, PointPair, make_pair
from .ranges import (
    Dominance3,
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

__all__ = [
    "brute_force_crcp",
    "brute_force_anchored",
    "global_closest_bich",
    "StripOracle",
    "QuadrantOracle",
    "DominanceOracle",
    "count_candidate_pairs",
    "gen_random",
    "gen_adversarial_strip",
    "gen_adversarial_quadrant",
    "QueryRecord",
    "BenchReport",
    "run_benchmark",
]


def _mk_pair(dataset: Dataset, norm: MonotoneNorm, a: int, b: int, length: float) -> Optional[PointPair]:
    if a < 0:
        return None
    pair = make_pair(dataset, norm, int(a), int(b))
    # lengths must agree with the kernel value bit-for-bit
    assert pair.length == length
    return pair


def brute_force_crcp(dataset: Dataset, norm: MonotoneNorm, rng: OrthoRange) -> Optional[PointPair]:
    """Exact closest bichromatic pair contained in the range; ties by index."""
    if norm.dim != dataset.dim or rng.dim != dataset.dim:
        raise UsageError("dimension mismatch")
    lo, hi = rng.bounds()
    a, b, l = K.brute_force_range(
        dataset.coords, dataset.colors, norm.weight_array, norm.p, lo, hi
    )
    return _mk_pair(dataset, norm, a, b, l)


def brute_force_anchored(
    dataset: Dataset, norm: MonotoneNorm, rng: OrthoRange, o: Sequence[float]
) -> Optional[PointPair]:
    """Exact closest o-anchored bichromatic pair contained in the range."""
    if norm.dim != dataset.dim or rng.dim != dataset.dim:
        raise UsageError("dimension mismatch")
    lo, hi = rng.bounds()
    a, b, l = K.brute_force_anchored(
        dataset.coords,
        dataset.colors,
        norm.weight_array,
        norm.p,
        lo,
        hi,
        np.asarray(o, dtype=np.float64),
    )
    return _mk_pair(dataset, norm, a, b, l)


def global_closest_bich(dataset: Dataset, norm: MonotoneNorm) -> Optional[PointPair]:
    """Global closest bichromatic pair via an independent vectorized sweep."""
    n = dataset.n
    if n < 2:
        return None
    coords = dataset.coords * norm.weight_array
    best = None
    for i in range(n - 1):
        diff = coords[i + 1 :] - coords[i]
        if norm.p == np.inf:
            dists = np.abs(diff).max(axis=1)
        else:
            dists = (np.abs(diff) ** norm.p).sum(axis=1) ** (1.0 / norm.p)
        mask = dataset.colors[i + 1 :] != dataset.colors[i]
        if not mask.any():
            continue
        idx = np.nonzero(mask)[0]
        j = idx[np.argmin(dists[idx])]
        cand = (float(dists[j]), i, i + 1 + int(j))
        if best is None or cand < best:
            best = cand
    if best is None:
        return None
    return make_pair(dataset, norm, best[1], best[2])


# ---------------------------------------------------------------------------
# canonical-range table oracles


def _axis_ranks(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    distinct, inverse = np.unique(values, return_inverse=True)
    return distinct, inverse.astype(np.int64)


class StripOracle:
    """Closest bichromatic pair of every canonical strip/slab on one axis."""

    def __init__(self, dataset: Dataset, norm: MonotoneNorm, axis: int):
        self.dataset = dataset
        self.axis = axis
        vals = dataset.coords[:, axis]
        self.distinct, inv = _axis_ranks(vals)
        order = np.lexsort((np.arange(dataset.n), vals)).astype(np.int64)
        self.L, self.A, self.B = K.window_cp_tables(
            dataset.coords, dataset.colors, norm.weight_array, norm.p, order
        )
        nd = len(self.distinct)
        self.start = np.searchsorted(vals[order], self.distinct, side="left")
        self.end = np.searchsorted(vals[order], self.distinct, side="right") - 1
        self.norm = norm

    def num_values(self) -> int:
        return len(self.distinct)

    def canonical(self, i: int, j: int) -> OrthoRange:
        lo = float(self.distinct[i])
        hi = float(self.distinct[j])
        if self.dataset.dim == 2:
            return Strip(self.axis, lo, hi)
        return Slab(self.dataset.dim, self.axis, lo, hi)

    def answer(self, i: int, j: int) -> Optional[PointPair]:
        a = int(self.A[self.start[i], self.end[j]])
        if a < 0:
            return None
        b = int(self.B[self.start[i], self.end[j]])
        return make_pair(self.dataset, self.norm, a, b)

    def answer_length(self, i: int, j: int) -> float:
        return float(self.L[self.start[i], self.end[j]])

    def candidate_pairs(self) -> set:
        out = set()
        nd = self.num_values()
        for i in range(nd):
            for j in range(i, nd):
                a = int(self.A[self.start[i], self.end[j]])
                if a >= 0:
                    out.add((a, int(self.B[self.start[i], self.end[j]])))
        return out


class QuadrantOracle:
    """Closest bichromatic pair of every canonical quadrant / two-box."""

    def __init__(
        self,
        dataset: Dataset,
        norm: MonotoneNorm,
        axes: Tuple[int, int] = (0, 1),
        signs: Tuple[int, int] = (1, 1),
    ):
        self.dataset = dataset
        self.norm = norm
        self.axes = axes
        self.signs = signs
        u = signs[0] * dataset.coords[:, axes[0]]
        v = signs[1] * dataset.coords[:, axes[1]]
        self.du, ru = _axis_ranks(u)
        self.dv, rv = _axis_ranks(v)
        self.L, self.A, self.B = K.corner_cp_tables(
            dataset.coords,
            dataset.colors,
            norm.weight_array,
            norm.p,
            ru,
            rv,
            len(self.du),
            len(self.dv),
        )

    def grid_shape(self) -> Tuple[int, int]:
        return len(self.du), len(self.dv)

    def canonical(self, i: int, j: int) -> OrthoRange:
        cx = float(self.signs[0] * self.du[i])
        cy = float(self.signs[1] * self.dv[j])
        if self.dataset.dim == 2 and self.axes == (0, 1):
            return Quadrant(self.signs, (cx, cy))
        return TwoBox(self.dataset.dim, self.axes, self.signs, (cx, cy))

    def answer(self, i: int, j: int) -> Optional[PointPair]:
        a = int(self.A[i, j])
        if a < 0:
            return None
        return make_pair(self.dataset, self.norm, a, int(self.B[i, j]))

    def answer_length(self, i: int, j: int) -> float:
        return float(self.L[i, j])

    def candidate_pairs(self) -> set:
        out = set()
        nx, ny = self.grid_shape()
        for i in range(nx):
            for j in range(ny):
                if self.A[i, j] >= 0:
                    out.add((int(self.A[i, j]), int(self.B[i, j])))
        return out


class DominanceOracle:
    """Closest bichromatic pair of every canonical 3D dominance region."""

    def __init__(self, dataset: Dataset, norm: MonotoneNorm):
        if dataset.dim != 3:
            raise UsageError("dominance oracle is 3D")
        self.dataset = dataset
        self.norm = norm
        self.dx, rx = _axis_ranks(dataset.coords[:, 0])
        self.dy, ry = _axis_ranks(dataset.coords[:, 1])
        self.dz, rz = _axis_ranks(dataset.coords[:, 2])
        self.L, self.A, self.B = K.dominance_cp_tables(
            dataset.coords,
            dataset.colors,
            norm.weight_array,
            norm.p,
            rx,
            ry,
            rz,
            len(self.dx),
            len(self.dy),
            len(self.dz),
        )

    def grid_shape(self) -> Tuple[int, int, int]:
        return len(self.dx), len(self.dy), len(self.dz)

    def canonical(self, i: int, j: int, k: int) -> Dominance3:
        return Dominance3((float(self.dx[i]), float(self.dy[j]), float(self.dz[k])))

    def answer(self, i: int, j: int, k: int) -> Optional[PointPair]:
        a = int(self.A[i, j, k])
        if a < 0:
            return None
        return make_pair(self.dataset, self.norm, a, int(self.B[i, j, k]))

    def answer_length(self, i: int, j: int, k: int) -> float:
        return float(self.L[i, j, k])


def count_candidate_pairs(dataset: Dataset, space, norm: MonotoneNorm) -> int:
    """Number of distinct pairs realized as the exact closest bichromatic
    pair of some canonical range of the space (strips or quadrants only)."""
    if isinstance(space, (StripSpace, SlabSpace)):
        axis = space.axis
        return len(StripOracle(dataset, norm, axis).candidate_pairs())
    if isinstance(space, QuadrantSpace):
        return len(QuadrantOracle(dataset, norm, (0, 1), space.signs).candidate_pairs())
    if isinstance(space, TwoBoxSpace):
        return len(QuadrantOracle(dataset, norm, space.axes, space.signs).candidate_pairs())
    raise UsageError("candidate counting supports strip and quadrant spaces")


# ---------------------------------------------------------------------------
# generators


def gen_random(
    n: int,
    num_colors: int,
    distribution: str = "uniform-box",
    d: int = 2,
    seed: int = 0,
) -> Dataset:
    """Deterministic random dataset; colors are assigned uniformly."""
    if n < 0 or num_colors < 1:
        raise UsageError("need n >= 0 and num_colors >= 1")
    rng = np.random.default_rng(seed)
    if distribution == "uniform-box":
        coords = rng.random((n, d))
    elif distribution == "clustered":
        k = max(1, n // 20)
        centers = rng.random((k, d))
        which = rng.integers(0, k, n)
        coords = centers[which] + rng.normal(0.0, 0.02, (n, d))
    else:
        raise UsageError(f"unknown distribution {distribution!r}")
    colors = rng.integers(0, num_colors, n).astype(np.int32)
    return Dataset(coords.reshape(n, d), colors)


def gen_adversarial_strip(n: int) -> Dataset:
    """2-colored set whose strip candidate-pair count grows quadratically.

    Red points a_i = (-i, n^2 - i*n) and blue points b_i = (i, i*n - n^2)
    for i in 1..n/2; every red/blue pair is the exact closest bichromatic
    pair of the strip spanning their x-coordinates.
    """
    if n < 2 or n % 2:
        raise UsageError("n must be even and >= 2")
    half = n // 2
    i = np.arange(1, half + 1, dtype=np.float64)
    reds = np.stack([-i, n * n - i * n], axis=1)
    blues = np.stack([i, i * n - n * n], axis=1)
    coords = np.vstack([reds, blues])
    colors = np.concatenate([np.zeros(half, np.int32), np.ones(half, np.int32)])
    return Dataset(coords, colors)


def gen_adversarial_quadrant(n: int) -> Dataset:
    """Quadrant-query analog of :func:`gen_adversarial_strip`."""
    if n < 2 or n % 2:
        raise UsageError("n must be even and >= 2")
    half = n // 2
    i = np.arange(1, half + 1, dtype=np.float64)
    reds = np.stack([-i, n * n - i * n], axis=1)
    blues = np.stack([n * n - i * n, -i], axis=1)
    coords = np.vstack([reds, blues])
    colors = np.concatenate([np.zeros(half, np.int32), np.ones(half, np.int32)])
    return Dataset(coords, colors)


# ---------------------------------------------------------------------------
# benchmark / verification harness


@dataclass
class QueryRecord:
    query: str
    answer: Optional[Tuple[int, int, float]]
    optimum: Optional[Tuple[int, int, float]]
    ratio: float
    elapsed: float
    comparisons: int

    def line(self) -> str:
        fa = "none" if self.answer is None else f"{self.answer[0]} {self.answer[1]} {self.answer[2]:.17g}"
        fo = "none" if self.optimum is None else f"{self.optimum[0]} {self.optimum[1]} {self.optimum[2]:.17g}"
        return (
            f"query\t{self.query}\tanswer\t{fa}\toptimum\t{fo}\t"
            f"ratio\t{self.ratio:.6f}\telapsed\t{self.elapsed:.6f}\tcomparisons\t{self.comparisons}"
        )


@dataclass
class BenchReport:
    kind: str
    eps: float
    records: List[QueryRecord] = field(default_factory=list)
    node_counts: dict = field(default_factory=dict)
    build_elapsed: float = 0.0

    def max_ratio(self) -> float:
        return max((r.ratio for r in self.records), default=1.0)

    def summary(self) -> str:
        lines = [
            f"kind {self.kind}",
            f"eps {self.eps:g}",
            f"queries {len(self.records)}",
            f"max_ratio {self.max_ratio():.6f}",
            f"build_elapsed {self.build_elapsed:.3f}",
        ]
        for key, val in sorted(self.node_counts.items()):
            lines.append(f"nodes.{key} {val}")
        return "\n".join(lines)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.records:
                fh.write(rec.line() + "\n")
            fh.write("# summary\n")
            for line in self.summary().splitlines():
                fh.write(f"# {line}\n")


def _pair_tuple(pair: Optional[PointPair]):
    return None if pair is None else (pair.a, pair.b, pair.length)


def check_answer(
    dataset: Dataset,
    norm: MonotoneNorm,
    eps: float,
    rng: OrthoRange,
    answer: Optional[PointPair],
    optimum: Optional[PointPair],
    query_text: str = "",
) -> float:
    """Soundness + ratio check for one query; returns the realized ratio.

    Raises :class:`VerificationError` with the offending triple when the
    answer is unsound, missing, or worse than (1 + eps) times the optimum.
    The ratio comparison is exact floating comparison, no tolerance.
    """
    text = query_text or repr(rng)
    if answer is None:
        if optimum is not None:
            raise VerificationError(
                f"missed pair on {text}", query=rng, answer=None, optimum=optimum
            )
        return 1.0
    if optimum is None:
        raise VerificationError(
            f"spurious answer on {text}", query=rng, answer=answer, optimum=None
        )
    from .ranges import contains_pair

    if dataset.colors[answer.a] == dataset.colors[answer.b]:
        raise VerificationError(
            f"monochromatic answer on {text}", query=rng, answer=answer, optimum=optimum
        )
    if not contains_pair(rng, dataset, answer):
        raise VerificationError(
            f"answer outside range on {text}", query=rng, answer=answer, optimum=optimum
        )
    expect = norm.distance(dataset.coords[answer.a], dataset.coords[answer.b])
    if expect != answer.length:
        raise VerificationError(
            f"wrong cached length on {text}", query=rng, answer=answer, optimum=optimum
        )
    if answer.length > (1.0 + eps) * optimum.length:
        raise VerificationError(
            f"ratio violation on {text}: {answer.length} > (1+{eps}) * {optimum.length}",
            query=rng,
            answer=answer,
            optimum=optimum,
        )
    return answer.length / optimum.length if optimum.length > 0 else 1.0


def run_benchmark(
    kind: str,
    dataset: Dataset,
    norm: MonotoneNorm,
    eps: float,
    queries: Sequence[OrthoRange],
    seed: int = 0,
) -> BenchReport:
    """Build the index of the given kind and verify it on the workload.

    Every answer is compared against the brute-force oracle; any soundness
    or ratio violation fails fast with the offending triple.
    """
    from .structures import build_index
    from .ranges import format_query

    t0 = time.perf_counter()
    index = build_index(kind, dataset, norm, eps)
    build_elapsed = time.perf_counter() - t0
    report = BenchReport(kind=kind, eps=eps, build_elapsed=build_elapsed)
    report.node_counts = index.stats()
    ncmp = dataset.n * max(0, dataset.n - 1) // 2
    for rng in queries:
        t1 = time.perf_counter()
        answer = index.query(rng)
        elapsed = time.perf_counter() - t1
        optimum = brute_force_crcp(dataset, norm, rng)
        text = format_query(rng)
        ratio = check_answer(dataset, norm, eps, rng, answer, optimum, text)
        report.records.append(
            QueryRecord(
                query=text,
                answer=_pair_tuple(answer),
                optimum=_pair_tuple(optimum),
                ratio=ratio,
                elapsed=elapsed,
                comparisons=ncmp,
            )
        )
    return report

"""Structure-against-oracle verification sweeps.

One implementation backs both the `crcp verify` subcommand and the
acceptance test suite: every canonical range of a kind (or a seeded random
workload where the canonical family is unbounded) is answered by the index
and compared with the exact oracle.  Any soundness or approximation-ratio
violation raises :class:`VerificationError` carrying the offending triple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from .errors import UsageError, VerificationError
from .geometry import Dataset, MonotoneNorm
from .oracle import (
    DominanceOracle,
    QuadrantOracle,
    StripOracle,
    brute_force_anchored,
    brute_force_crcp,
    check_answer,
)
from .ranges import Box3, Rect, format_query
from .structures import build_index

__all__ = ["VerifySummary", "verify_kind", "VERIFY_KINDS"]

VERIFY_KINDS = (
    "strip",
    "quadrant",
    "rect1",
    "rect2",
    "slab",
    "2box",
    "dom3",
    "anchored2d",
    "anchored3d",
)


@dataclass
class VerifySummary:
    kind: str
    n: int
    eps: float
    norm: str
    queries: int = 0
    max_ratio: float = 1.0
    node_counts: Dict[str, int] = field(default_factory=dict)

    def record(self, ratio: float):
        self.queries += 1
        if ratio > self.max_ratio:
            self.max_ratio = ratio

    def lines(self) -> List[str]:
        out = [
            f"kind {self.kind}",
            f"n {self.n}",
            f"eps {self.eps:g}",
            f"norm {self.norm}",
            f"queries {self.queries}",
            f"max_ratio {self.max_ratio:.6f}",
        ]
        out.extend(f"nodes.{k} {v}" for k, v in sorted(self.node_counts.items()))
        return out


def _sweep_strips(index, ds, norm, eps, summary, axes):
    for axis in axes:
        oracle = StripOracle(ds, norm, axis)
        nd = oracle.num_values()
        for i in range(nd):
            for j in range(i, nd):
                rng = oracle.canonical(i, j)
                ans = index.query(rng)
                opt = oracle.answer(i, j)
                summary.record(
                    check_answer(ds, norm, eps, rng, ans, opt, format_query(rng))
                )


def _sweep_quadrants(index, ds, norm, eps, summary, configs):
    for axes, signs in configs:
        oracle = QuadrantOracle(ds, norm, axes, signs)
        nx, ny = oracle.grid_shape()
        for i in range(nx):
            for j in range(ny):
                rng = oracle.canonical(i, j)
                ans = index.query(rng)
                opt = oracle.answer(i, j)
                summary.record(
                    check_answer(ds, norm, eps, rng, ans, opt, format_query(rng))
                )


def _sweep_dominance(index, ds, norm, eps, summary):
    oracle = DominanceOracle(ds, norm)
    nx, ny, nz = oracle.grid_shape()
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                rng = oracle.canonical(i, j, k)
                ans = index.query(rng)
                opt = oracle.answer(i, j, k)
                summary.record(
                    check_answer(ds, norm, eps, rng, ans, opt, format_query(rng))
                )


def _random_rects(index, ds, norm, eps, summary, count, seed):
    rng = np.random.default_rng(seed)
    span = ds.coords.max(axis=0) - ds.coords.min(axis=0) if ds.n else np.ones(2)
    lo0 = ds.coords.min(axis=0) if ds.n else np.zeros(2)
    for _ in range(count):
        c = lo0 + rng.random((2, 2)) * (span + 1e-9)
        lo = c.min(axis=0)
        hi = c.max(axis=0)
        q = Rect(lo[0], hi[0], lo[1], hi[1])
        ans = index.query(q)
        opt = brute_force_crcp(ds, norm, q)
        summary.record(check_answer(ds, norm, eps, q, ans, opt, format_query(q)))


def _random_anchored(index, ds, norm, eps, summary, count, seed, dim):
    rng = np.random.default_rng(seed)
    span = ds.coords.max(axis=0) - ds.coords.min(axis=0) if ds.n else np.ones(dim)
    lo0 = ds.coords.min(axis=0) if ds.n else np.zeros(dim)
    for t in range(count):
        c = lo0 + rng.random((2, dim)) * (span + 1e-9)
        lo = c.min(axis=0)
        hi = c.max(axis=0)
        if dim == 2:
            q = Rect(lo[0], hi[0], lo[1], hi[1])
        else:
            q = Box3([lo[0], hi[0], lo[1], hi[1], lo[2], hi[2]])
        o = lo + rng.random(dim) * (hi - lo)
        ans = index.query(q, tuple(o))
        opt = brute_force_anchored(ds, norm, q, o)
        text = format_query(q) + " @ " + " ".join(f"{x:.17g}" for x in o)
        if ans is None and opt is None:
            summary.record(1.0)
            continue
        if (ans is None) != (opt is None):
            raise VerificationError(
                f"anchored none mismatch on {text}", query=q, answer=ans, optimum=opt
            )
        if ans.length > (1.0 + eps) * opt.length:
            raise VerificationError(
                f"anchored ratio violation on {text}", query=q, answer=ans, optimum=opt
            )
        summary.record(ans.length / opt.length if opt.length else 1.0)
        # an anchor outside the range reports nothing
        out = np.asarray(hi) + 1.0
        if index.query(q, tuple(out)) is not None:
            raise VerificationError(f"answer for outside anchor on {text}", query=q)


def verify_kind(
    kind: str,
    ds: Dataset,
    norm: MonotoneNorm,
    eps: float,
    seed: int = 0,
    rect_count: int = 200,
    anchored_count: int = 30,
    corrupt: bool = False,
) -> VerifySummary:
    """Build the index kind on the dataset and verify it exhaustively.

    Strip/quadrant/slab/2box/dom3 kinds sweep every canonical range;
    rectangle kinds use ``rect_count`` seeded random rectangles; the
    anchored kinds use seeded random (range, anchor) workloads.
    """
    if kind not in VERIFY_KINDS:
        raise UsageError(f"unknown kind {kind!r}")
    index = build_index(kind, ds, norm, eps)
    if corrupt:
        if kind != "strip":
            raise UsageError("the corruption hook is defined for the strip kind")
        index = index.corrupted_copy_for_test()
    summary = VerifySummary(kind, ds.n, eps, norm.spec(), node_counts=dict())
    if hasattr(index, "stats"):
        summary.node_counts = index.stats()
    else:
        summary.node_counts = {"total": index.node_count()}
    if kind == "strip":
        _sweep_strips(index, ds, norm, eps, summary, (0, 1))
    elif kind == "slab":
        _sweep_strips(index, ds, norm, eps, summary, (0, 1, 2))
    elif kind == "quadrant":
        _sweep_quadrants(
            index, ds, norm, eps, summary,
            [((0, 1), s) for s in ((1, 1), (-1, 1), (-1, -1), (1, -1))],
        )
    elif kind == "2box":
        _sweep_quadrants(
            index, ds, norm, eps, summary,
            [(axes, (1, 1)) for axes in ((1, 2), (0, 2), (0, 1))],
        )
    elif kind == "dom3":
        _sweep_dominance(index, ds, norm, eps, summary)
    elif kind in ("rect1", "rect2"):
        _random_rects(index, ds, norm, eps, summary, rect_count, seed)
    elif kind == "anchored2d":
        _random_anchored(index, ds, norm, eps, summary, anchored_count, seed, 2)
    elif kind == "anchored3d":
        _random_anchored(index, ds, norm, eps, summary, anchored_count, seed, 3)
    return summary

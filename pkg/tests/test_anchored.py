import math

import numpy as np
import pytest

import crcp
from crcp import Dataset, MonotoneNorm, Rect, UsageError
from crcp.anchored import AnchoredIndex2D, AnchoredIndex3D, build_anchored2d
from crcp.oracle import brute_force_anchored
from crcp.ranges import Box3
from conftest import dataset_from, norms_2d, norms_3d


def test_empty_dataset_answers_none():
    idx = build_anchored2d(Dataset.empty(2), MonotoneNorm(2, 2.0), 0.5)
    assert idx.query(Rect(0, 1, 0, 1), (0.5, 0.5)) is None


def test_unique_straddling_pair():
    ds = dataset_from([(1, 1), (-1, -1)], [0, 1])
    for eps in (0.05, 0.5, 2.0):
        idx = build_anchored2d(ds, MonotoneNorm(2, 2.0), eps)
        got = idx.query(Rect(-2, 2, -2, 2), (0.0, 0.0))
        assert got is not None and (got.a, got.b) == (0, 1)


def test_anchor_outside_range_returns_none():
    ds = dataset_from([(1, 1), (-1, -1)], [0, 1])
    idx = build_anchored2d(ds, MonotoneNorm(2, 2.0), 0.5)
    assert idx.query(Rect(-2, 2, -2, 2), (10.0, 10.0)) is None


def test_nw_se_pairs_found():
    ds = dataset_from([(-1, 1), (1, -1)], [0, 1])
    idx = build_anchored2d(ds, MonotoneNorm(2, 2.0), 0.5)
    got = idx.query(Rect(-2, 2, -2, 2), (0.0, 0.0))
    assert got is not None and (got.a, got.b) == (0, 1)


def test_eps_must_be_positive():
    ds = dataset_from([(0, 0), (1, 1)], [0, 1])
    with pytest.raises(UsageError):
        AnchoredIndex2D(ds, MonotoneNorm(2, 2.0), 0.0)


def test_random_ratio_2d(rng):
    worst = 1.0
    for trial in range(12):
        n = int(rng.integers(3, 90))
        ds = crcp.gen_random(n, int(rng.integers(2, 5)), "uniform-box", 2, 1000 + trial)
        norm = norms_2d()[trial % len(norms_2d())]
        eps = [0.1, 0.5][trial % 2]
        idx = AnchoredIndex2D(ds, norm, eps)
        for _ in range(10):
            c = rng.random((2, 2))
            lo, hi = c.min(0), c.max(0)
            rect = Rect(lo[0], hi[0], lo[1], hi[1])
            o = lo + rng.random(2) * (hi - lo)
            ans = idx.query(rect, tuple(o))
            opt = brute_force_anchored(ds, norm, rect, o)
            assert (ans is None) == (opt is None)
            if ans is not None:
                # soundness: anchored, bichromatic, inside
                assert ds.colors[ans.a] != ds.colors[ans.b]
                box_lo = np.minimum(ds.coords[ans.a], ds.coords[ans.b])
                box_hi = np.maximum(ds.coords[ans.a], ds.coords[ans.b])
                assert (box_lo <= o).all() and (o <= box_hi).all()
                assert (ds.coords[ans.a] >= lo).all() and (ds.coords[ans.a] <= hi).all()
                assert ans.length <= (1.0 + eps) * opt.length
                if opt.length:
                    worst = max(worst, ans.length / opt.length)
    assert worst <= 1.5


def test_random_ratio_3d(rng):
    for trial in range(6):
        n = int(rng.integers(3, 50))
        ds = crcp.gen_random(n, 3, "uniform-box", 3, 2000 + trial)
        norm = norms_3d()[trial % len(norms_3d())]
        eps = [0.5, 1.0][trial % 2]
        idx = AnchoredIndex3D(ds, norm, eps)
        for _ in range(6):
            c = rng.random((2, 3))
            lo, hi = c.min(0), c.max(0)
            box = Box3([lo[0], hi[0], lo[1], hi[1], lo[2], hi[2]])
            o = lo + rng.random(3) * (hi - lo)
            ans = idx.query(box, tuple(o))
            opt = brute_force_anchored(ds, norm, box, o)
            assert (ans is None) == (opt is None)
            if ans is not None:
                assert ans.length <= (1.0 + eps) * opt.length


def _sector_membership(dirs, o, p):
    mus = dirs @ o
    return bool((dirs @ p >= mus).all())


def test_sector_angle_soundness_2d(rng):
    # two points accepted by the same sector's wedge predicates subtend at
    # most theta at the anchor
    for eps in (0.3, 0.8):
        idx = AnchoredIndex2D(dataset_from([(0, 0), (1, 1)], [0, 1]), MonotoneNorm(2, 2.0), eps)
        theta = idx.theta
        fam = idx.classes[0].fams[1][0]  # identity class, plus role, 4-gon stores
        o = rng.normal(size=2)
        pts = o + rng.random((400, 2))  # NE region of o
        hits = 0
        for i in range(idx.k):
            wedge = fam.dirs[i, :2, :]  # the two fan lines only
            members = [p for p in pts if _sector_membership(wedge, o, p)]
            for s in range(0, len(members) - 1, 2):
                u = members[s] - o
                v = members[s + 1] - o
                cosang = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
                ang = math.acos(min(1.0, max(-1.0, cosang)))
                assert ang <= theta + 1e-9
                hits += 1
        assert hits > 50


def test_sector_angle_soundness_3d(rng):
    # the plane grid guarantees an angle bounded by ~1.8x the grid step
    # (the step itself is at most 2*theta); sampled pairs must respect it
    for eps in (0.8, 1.5):
        idx = AnchoredIndex3D(
            dataset_from([(0, 0, 0), (1, 1, 1)], [0, 1]), MonotoneNorm(3, 2.0), eps
        )
        k = idx.k
        step = math.pi / (2 * k)
        assert step <= 2 * idx.theta
        bound = 1.8 * step
        fam = idx.classes[0].fams[1]
        o = rng.normal(size=3)
        pts = o + rng.random((600, 3))
        hits = 0
        for s in range(k * k):
            wedge = fam.dirs[s, :4, :]
            members = [p for p in pts if _sector_membership(wedge, o, p)]
            for t in range(0, len(members) - 1, 2):
                u = members[t] - o
                v = members[t + 1] - o
                cosang = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
                ang = math.acos(min(1.0, max(-1.0, cosang)))
                assert ang <= bound + 1e-9
                hits += 1
        assert hits > 50


def test_angle_lemma_numeric(rng):
    # hypotheses: a*, a northeast of o with angle <= theta and a* L1-closer;
    # same on the southwest side; conclusion: the starred pair is within 1+eps
    for norm in norms_2d():
        eps = 0.4
        theta = eps / 8.0
        for _ in range(400):
            o = rng.normal(size=2)
            beta = rng.random() * (math.pi / 2 - theta)
            db = rng.random() * theta
            r1, r2 = 0.1 + rng.random(2)
            a = o + r1 * np.array([math.cos(beta), math.sin(beta)])
            astar_dir = np.array([math.cos(beta + db), math.sin(beta + db)])
            # scale a* so its L1 distance to o does not exceed a's
            l1_a = abs(a - o).sum()
            astar = o + astar_dir * (rng.random() * l1_a / abs(astar_dir).sum())
            gamma = rng.random() * (math.pi / 2 - theta)
            dg = rng.random() * theta
            b = o - r2 * np.array([math.cos(gamma), math.sin(gamma)])
            bstar_dir = -np.array([math.cos(gamma + dg), math.sin(gamma + dg)])
            l1_b = abs(b - o).sum()
            bstar = o + bstar_dir * (rng.random() * l1_b / abs(bstar_dir).sum())
            lhs = norm.distance(astar, bstar)
            rhs = (1.0 + eps) * norm.distance(a, b)
            assert lhs <= rhs * (1 + 1e-12)


def test_l1_nn_reduction(rng):
    # northeast of the anchor, the additive weight x+y orders points exactly
    # like their L1 distance to the anchor
    for _ in range(50):
        o = rng.normal(size=2)
        pts = o + rng.random((40, 2))
        l1 = np.abs(pts - o).sum(axis=1)
        w = pts.sum(axis=1)
        assert np.argmin(l1) == np.argmin(w)
        sw = o - rng.random((40, 2))
        l1sw = np.abs(sw - o).sum(axis=1)
        wsw = sw.sum(axis=1)
        assert np.argmin(l1sw) == np.argmax(wsw)


def test_degenerate_anchor_on_rect_corner():
    # anchor on the rectangle corner: most sector regions are empty, the
    # straddling pair along the boundary is still found
    ds = dataset_from([(1, 1), (0.5, 0.5)], [0, 1])
    idx = build_anchored2d(ds, MonotoneNorm(2, 2.0), 0.5)
    got = idx.query(Rect(0, 1, 0, 1), (1.0, 1.0))
    assert got is not None and (got.a, got.b) == (0, 1)
    # anchor on a corner with no straddling pair reports nothing
    assert idx.query(Rect(0, 0.4, 0, 0.4), (0.0, 0.0)) is None


def test_space_instrumentation_doubling():
    norm = MonotoneNorm(2, 2.0)
    eps = 0.5
    consts = []
    for n in (64, 128, 256):
        ds = crcp.gen_random(n, 3, "uniform-box", 2, n)
        idx = AnchoredIndex2D(ds, norm, eps)
        bound = (1 / eps) * n * math.log2(n) ** 3
        consts.append(idx.node_count() / bound)
    for a, b in zip(consts, consts[1:]):
        assert 0.5 <= b / a <= 2.0

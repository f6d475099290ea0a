import numpy as np
import pytest

from crcp import UsageError
from crcp.top2 import Top2Answer, Top2Family, build_top2, merge_answers, query_top2


def rand_store(rng, n, c, d=2, colors=3, stores=1):
    coords = rng.random((n, d))
    weights = rng.random(n)
    cols = rng.integers(0, colors, n).astype(np.int32)
    dirs = rng.normal(size=(stores, c, d))
    return coords, weights, cols, dirs


def test_empty_store():
    store = build_top2(np.zeros((0, 2)), np.zeros(0), np.zeros(0, np.int32), np.eye(2))
    assert store.query(np.zeros(2)) == Top2Answer(None, None)


def test_monochromatic_second_is_none(rng):
    coords, weights, cols, dirs = rand_store(rng, 50, 3, colors=1)
    store = build_top2(coords, weights, cols, dirs[0])
    for _ in range(50):
        base = coords[rng.integers(0, 50)]
        mus = dirs[0] @ base - rng.random(3) * 0.1
        ans = store.query(mus)
        assert ans.second is None
        assert ans == store.scan(mus)


@pytest.mark.parametrize("c", [2, 3, 4, 5, 6, 7])
def test_matches_scan_all_direction_counts(c, rng):
    d = 3 if c > 4 else 2
    coords, weights, cols, dirs = rand_store(rng, 120, c, d=d, stores=3)
    fam = Top2Family(coords, weights, cols, dirs)
    for t in range(300):
        s = int(rng.integers(0, 3))
        base = coords[rng.integers(0, 120)]
        mus = dirs[s] @ base - rng.random(c) * 0.3
        ref = fam.scan(s, mus)
        assert fam.query(s, mus, use_cascading=True) == ref
        assert fam.query(s, mus, use_cascading=False) == ref


def test_query_top2_wrapper(rng):
    coords, weights, cols, dirs = rand_store(rng, 40, 4)
    store = build_top2(coords, weights, cols, dirs[0])
    mus = dirs[0] @ coords[0] - 0.05
    assert query_top2(store, mus) == store.scan(mus)


def test_all_points_range(rng):
    coords, weights, cols, dirs = rand_store(rng, 80, 2, colors=2)
    store = build_top2(coords, weights, cols, dirs[0])
    scal = coords @ dirs[0].T
    mus = scal.min(axis=0) - 1.0
    ans = store.query(mus)
    first = int(np.lexsort((np.arange(80), weights))[0])
    assert ans.first == first
    others = weights.copy()
    others[cols == cols[first]] = np.inf
    assert ans.second == int(np.lexsort((np.arange(80), others))[0])


def test_single_point_range(rng):
    coords = np.array([[0.0, 0.0], [10.0, 10.0]])
    weights = np.array([1.0, 2.0])
    cols = np.array([0, 1], np.int32)
    store = build_top2(coords, weights, cols, np.array([[1.0, 0.0], [0.0, 1.0]]))
    ans = store.query(np.array([5.0, 5.0]))
    assert ans == Top2Answer(1, None)


def test_decomposability(rng):
    coords, weights, cols, dirs = rand_store(rng, 90, 4, stores=1)
    fam = Top2Family(coords, weights, cols, dirs)
    for _ in range(60):
        base = coords[rng.integers(0, 90)]
        mus = dirs[0] @ base - rng.random(4) * 0.2
        whole = fam.scan(0, mus)
        parts = rng.integers(0, 3, 90)
        partial = []
        from crcp import _kernels as K

        for part in range(3):
            rows = np.nonzero(parts == part)[0].astype(np.int64)
            f, s = K.top2_scan_rows(fam.scal3[0], fam.weights, fam.colors, mus, rows)
            partial.append(Top2Answer(None if f < 0 else int(f), None if s < 0 else int(s)))
        assert merge_answers(partial, weights, cols) == whole


def test_direction_count_bounds(rng):
    coords, weights, cols, _ = rand_store(rng, 10, 2)
    with pytest.raises(UsageError):
        build_top2(coords, weights, cols, np.ones((1, 2)))
    with pytest.raises(UsageError):
        build_top2(coords, weights, cols, np.ones((8, 2)))
    with pytest.raises(UsageError):
        build_top2(coords, weights, cols, np.vstack([np.zeros((1, 2)), np.ones((1, 2))]))


def test_nonfinite_weights_rejected(rng):
    coords, weights, cols, dirs = rand_store(rng, 10, 2)
    weights[3] = np.inf
    with pytest.raises(UsageError):
        build_top2(coords, weights, cols, dirs[0])


def test_node_count_positive(rng):
    coords, weights, cols, dirs = rand_store(rng, 200, 4, stores=2)
    fam = Top2Family(coords, weights, cols, dirs)
    assert fam.node_count() > 200


def test_space_instrumentation_doubling(rng):
    # node count tracks m * log^(c-1) m with a constant stable within 2x
    import math

    c = 3
    dirs = rng.normal(size=(c, 2))
    consts = []
    for m in (256, 512, 1024):
        coords = rng.random((m, 2))
        store = build_top2(coords, rng.random(m), rng.integers(0, 3, m).astype(np.int32), dirs)
        consts.append(store.node_count() / (m * math.log2(m) ** (c - 1)))
    for a, b in zip(consts, consts[1:]):
        assert 0.5 <= b / a <= 2.0

import numpy as np
import pytest

import crcp
from crcp import (
    MonotoneNorm,
    QuadrantSpace,
    Rect,
    Strip,
    StripSpace,
    UsageError,
    VerificationError,
    brute_force_anchored,
    brute_force_crcp,
    count_candidate_pairs,
    gen_adversarial_quadrant,
    gen_adversarial_strip,
    gen_random,
    global_closest_bich,
    run_benchmark,
)
from crcp.oracle import DominanceOracle, QuadrantOracle, StripOracle
from conftest import dataset_from, norms_2d


def test_brute_force_examples():
    norm = MonotoneNorm(2, 2.0)
    ds = dataset_from([(0, 0), (1, 0)], [0, 1])
    got = brute_force_crcp(ds, norm, Rect(-1, 2, -1, 1))
    assert got is not None and got.length == 1.0
    assert brute_force_crcp(ds, norm, Rect(0.5, 2, -1, 1)) is None
    ds2 = dataset_from([(0, 0), (3, 0), (0, 4)], [0, 1, 1])
    got = brute_force_crcp(ds2, norm, Rect(-1, 5, -1, 5))
    assert (got.a, got.b, got.length) == (0, 1, 3.0)


def test_brute_force_anchored_examples():
    norm = MonotoneNorm(2, 2.0)
    ds = dataset_from([(1, 1), (-1, -1)], [0, 1])
    assert brute_force_anchored(ds, norm, Rect(-2, 2, -2, 2), (5, 5)) is None
    got = brute_force_anchored(ds, norm, Rect(-2, 2, -2, 2), (0, 0))
    assert got is not None and (got.a, got.b) == (0, 1)


def test_anchored_agrees_when_optimum_is_anchored(rng):
    # anchoring at a point inside the optimum's bounding box keeps the
    # unrestricted optimum feasible, so the anchored oracle returns it
    for trial in range(20):
        ds = gen_random(int(rng.integers(4, 40)), 3, "uniform-box", 2, trial)
        norm = norms_2d()[trial % len(norms_2d())]
        rect = Rect(0, 1, 0, 1)
        opt = brute_force_crcp(ds, norm, rect)
        if opt is None:
            continue
        blo = np.minimum(ds.coords[opt.a], ds.coords[opt.b])
        bhi = np.maximum(ds.coords[opt.a], ds.coords[opt.b])
        o = (blo + bhi) / 2.0
        anch = brute_force_anchored(ds, norm, rect, o)
        assert anch == opt


def test_check_answer_raises_on_bad_triples():
    from crcp.oracle import check_answer
    from crcp.geometry import make_pair

    ds = dataset_from([(0, 0), (1, 0), (5, 5)], [0, 1, 1])
    norm = MonotoneNorm(2, 2.0)
    rect = Rect(-1, 2, -1, 1)
    good = make_pair(ds, norm, 0, 1)
    assert check_answer(ds, norm, 0.5, rect, good, good) == 1.0
    with pytest.raises(VerificationError):
        check_answer(ds, norm, 0.5, rect, None, good)  # missed pair
    with pytest.raises(VerificationError):
        check_answer(ds, norm, 0.5, rect, good, None)  # spurious answer
    outside = make_pair(ds, norm, 0, 2)
    with pytest.raises(VerificationError):
        check_answer(ds, norm, 0.5, rect, outside, good)  # not contained
    far = make_pair(ds, norm, 1, 2)
    with pytest.raises(VerificationError):
        check_answer(ds, norm, 0.05, Rect(-9, 9, -9, 9), far, good)  # ratio


def test_whole_plane_matches_independent_double_loop(rng):
    for trial in range(15):
        ds = gen_random(int(rng.integers(2, 60)), int(rng.integers(1, 4)), "uniform-box", 2, 70 + trial)
        norm = norms_2d()[trial % len(norms_2d())]
        whole = Rect(-10, 10, -10, 10)
        assert brute_force_crcp(ds, norm, whole) == global_closest_bich(ds, norm)


def test_adversarial_strip_values():
    ds = gen_adversarial_strip(2)
    assert tuple(ds.coords[0]) == (-1.0, 2.0)
    assert tuple(ds.coords[1]) == (1.0, -2.0)
    ds8 = gen_adversarial_strip(8)
    assert tuple(ds8.coords[0]) == (-1.0, 56.0)
    assert tuple(ds8.coords[4]) == (1.0, -56.0)
    with pytest.raises(UsageError):
        gen_adversarial_strip(7)


def test_adversarial_distance_monotonicity():
    # computed exhaustively: red-blue distances are non-increasing as either
    # index grows, which is what makes every red-blue pair a candidate
    norm = MonotoneNorm(2, 2.0)
    for gen in (gen_adversarial_strip, gen_adversarial_quadrant):
        for n in (8, 16, 64):
            ds = gen(n)
            half = n // 2
            d = np.zeros((half, half))
            for i in range(half):
                for j in range(half):
                    d[i, j] = norm.distance(ds.coords[i], ds.coords[half + j])
            assert (np.diff(d, axis=0) <= 1e-9).all()
            assert (np.diff(d, axis=1) <= 1e-9).all()


def test_candidate_count_examples():
    norm = MonotoneNorm(2, 2.0)
    two = dataset_from([(0, 0), (1, 1)], [0, 1])
    assert count_candidate_pairs(two, StripSpace(0), norm) == 1
    mono = dataset_from([(0, 0), (1, 1)], [0, 0])
    assert count_candidate_pairs(mono, StripSpace(0), norm) == 0
    adv = gen_adversarial_strip(16)
    assert count_candidate_pairs(adv, StripSpace(0), norm) >= 16 * 16 / 4
    advq = gen_adversarial_quadrant(16)
    assert count_candidate_pairs(advq, QuadrantSpace((1, 1)), norm) >= 16 * 16 / 4


def test_gen_random_deterministic(tmp_path):
    a = gen_random(50, 3, "clustered", 2, 123)
    b = gen_random(50, 3, "clustered", 2, 123)
    pa = tmp_path / "a.txt"
    pb = tmp_path / "b.txt"
    crcp.save_dataset(a, pa)
    crcp.save_dataset(b, pb)
    assert pa.read_bytes() == pb.read_bytes()
    c = gen_random(50, 3, "clustered", 2, 124)
    assert not np.array_equal(a.coords, c.coords)
    assert gen_random(0, 2).n == 0
    mono = gen_random(30, 1, seed=5)
    assert crcp.bichromatic_pairs(mono).shape[0] == 0


def test_table_oracles_match_brute_force(rng):
    ds = gen_random(35, 3, "uniform-box", 2, 9)
    norm = MonotoneNorm(2, 1.0)
    so = StripOracle(ds, norm, 0)
    nd = so.num_values()
    for _ in range(100):
        i, j = sorted(rng.integers(0, nd, 2))
        assert so.answer(int(i), int(j)) == brute_force_crcp(ds, norm, so.canonical(int(i), int(j)))
    qo = QuadrantOracle(ds, norm, (0, 1), (1, 1))
    nx, ny = qo.grid_shape()
    for _ in range(100):
        i = int(rng.integers(0, nx))
        j = int(rng.integers(0, ny))
        assert qo.answer(i, j) == brute_force_crcp(ds, norm, qo.canonical(i, j))
    ds3 = gen_random(20, 2, "uniform-box", 3, 10)
    norm3 = MonotoneNorm(3, 2.0)
    do = DominanceOracle(ds3, norm3)
    nx, ny, nz = do.grid_shape()
    for _ in range(80):
        i, j, k = (int(rng.integers(0, m)) for m in (nx, ny, nz))
        assert do.answer(i, j, k) == brute_force_crcp(ds3, norm3, do.canonical(i, j, k))


def test_run_benchmark():
    ds = gen_random(40, 3, "uniform-box", 2, 3)
    norm = MonotoneNorm(2, 2.0)
    empty = run_benchmark("strip", ds, norm, 0.5, [])
    assert empty.records == [] and empty.max_ratio() == 1.0
    queries = [Strip(0, 0.1, 0.8), Strip(1, 0.2, 0.9), Strip(0, 0.4, 0.41)]
    rep = run_benchmark("strip", ds, norm, 0.5, queries)
    assert len(rep.records) == 3
    assert rep.max_ratio() <= 1.5
    text = rep.summary()
    assert "max_ratio" in text and "nodes.total" in text


def test_run_benchmark_fails_fast_on_bad_kind():
    ds = gen_random(10, 2, "uniform-box", 2, 1)
    with pytest.raises(UsageError):
        run_benchmark("mystery", ds, MonotoneNorm(2, 2.0), 0.5, [])

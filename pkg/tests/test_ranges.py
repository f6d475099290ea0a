import math

import pytest

import crcp
from crcp import (
    Dominance3,
    MonotoneNorm,
    Quadrant,
    QuadrantSpace,
    Rect,
    Slab,
    SlabSpace,
    Strip,
    StripSpace,
    TwoBox,
    TwoBoxSpace,
    UsageError,
    check_well_behaved,
    contains_pair,
    contains_point,
    format_query,
    parse_query,
    range_subseteq,
    smallest_range,
)
from crcp.geometry import make_pair
from conftest import dataset_from

INF = math.inf


def test_contains_point_examples():
    assert contains_point(Strip(0, 0, 2), (1, 99))
    assert contains_point(Quadrant((1, 1), (0, 0)), (0, 0))
    assert not contains_point(Dominance3((1, 1, 1)), (0, 2, 2))


def test_contains_pair_matches_two_point_checks(rng):
    ds = crcp.gen_random(30, 2, "uniform-box", 2, 3)
    norm = MonotoneNorm(2, 2.0)
    for _ in range(200):
        i, j = rng.choice(30, 2, replace=False)
        pair = make_pair(ds, norm, int(i), int(j))
        c = rng.random((2, 2))
        rect = Rect(min(c[0, 0], c[1, 0]), max(c[0, 0], c[1, 0]), min(c[0, 1], c[1, 1]), max(c[0, 1], c[1, 1]))
        expect = contains_point(rect, ds.coords[i]) and contains_point(rect, ds.coords[j])
        assert contains_pair(rect, ds, pair) == expect


def test_empty_interval_rejected():
    with pytest.raises(UsageError):
        Strip(0, 2.0, 1.0)


def test_smallest_range_examples():
    ds = dataset_from([(1, 5), (3, 2), (1, 9, ), ], [0, 1, 0])
    norm = MonotoneNorm(2, 2.0)
    pair = make_pair(ds, norm, 0, 1)
    strip = smallest_range(StripSpace(0), ds, pair)
    assert (strip.lo[0], strip.hi[0]) == (1.0, 3.0)
    quad = smallest_range(QuadrantSpace((1, 1)), ds, pair)
    assert quad.corner == (1.0, 2.0)
    ds3 = dataset_from([(1, 9, 9), (3, 0, 0)], [0, 1])
    pair3 = make_pair(ds3, MonotoneNorm(3, 2.0), 0, 1)
    slab = smallest_range(SlabSpace(3, 0), ds3, pair3)
    assert (slab.lo[0], slab.hi[0]) == (1.0, 3.0)
    assert slab.lo[1] == -INF and slab.hi[2] == INF


def test_smallest_range_orientation_error():
    ds = dataset_from([(0, 0), (1, 1)], [0, 1])
    pair = make_pair(ds, MonotoneNorm(2, 2.0), 0, 1)  # NE-SW
    with pytest.raises(UsageError):
        smallest_range(QuadrantSpace((1, 1)), ds, pair)


def test_smallest_range_is_smallest(rng):
    # 10^3 random containing ranges per sampled pair
    ds = crcp.gen_random(40, 3, "uniform-box", 2, 11)
    norm = MonotoneNorm(2, 2.0)
    pairs = crcp.bichromatic_pairs(ds)
    space = StripSpace(0)
    for t in range(20):
        a, b = pairs[rng.integers(0, len(pairs))]
        pair = make_pair(ds, norm, int(a), int(b))
        small = smallest_range(space, ds, pair)
        lo = min(ds.coords[a, 0], ds.coords[b, 0])
        hi = max(ds.coords[a, 0], ds.coords[b, 0])
        grows = rng.random((1000, 2))
        for grow in grows:
            bigger = Strip(0, lo - grow[0], hi + grow[1])
            assert contains_pair(bigger, ds, pair)
            assert range_subseteq(small, bigger)


def test_check_well_behaved_strips_any_pairs(rng):
    # strips are well-behaved on any pair set: 100 random sets per axis
    for seed in range(100):
        ds = crcp.gen_random(10, 3, "uniform-box", 2, seed)
        norm = MonotoneNorm(2, 2.0)
        pairs = [make_pair(ds, norm, int(a), int(b)) for a, b in crcp.bichromatic_pairs(ds)]
        assert check_well_behaved(StripSpace(0), ds, pairs) is None
        assert check_well_behaved(StripSpace(1), ds, pairs) is None


def test_check_well_behaved_quadrants_on_diagonal_pairs(rng):
    # quadrants are well-behaved on pair sets of the matching diagonal
    # class: 100 random sets per orientation
    from crcp.coreset import pairs_for_space

    for seed in range(100):
        ds = crcp.gen_random(10, 3, "uniform-box", 2, 100 + seed)
        norm = MonotoneNorm(2, 2.0)
        for signs in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            space = QuadrantSpace(signs)
            arr = pairs_for_space(ds, space)
            pairs = [make_pair(ds, norm, int(a), int(b)) for a, b in arr]
            assert check_well_behaved(space, ds, pairs) is None


def test_check_well_behaved_flags_wrong_orientation():
    # a NE-SW pair in a NE-quadrant space is a violation witness
    ds = dataset_from([(0, 0), (1, 1), (0, 2)], [0, 1, 1])
    norm = MonotoneNorm(2, 2.0)
    bad = make_pair(ds, norm, 0, 1)  # NE-SW
    ok = make_pair(ds, norm, 0, 2)  # both (shared x); strongly adjacent at (0,0)
    violation = check_well_behaved(QuadrantSpace((1, 1)), ds, [bad, ok])
    assert violation is not None
    assert bad in violation.pairs


def test_check_well_behaved_slabs_and_twoboxes(rng):
    from crcp.coreset import pairs_for_space

    ds = crcp.gen_random(14, 2, "uniform-box", 3, 9)
    norm = MonotoneNorm(3, 2.0)
    all_pairs = [make_pair(ds, norm, int(a), int(b)) for a, b in crcp.bichromatic_pairs(ds)]
    for axis in range(3):
        assert check_well_behaved(SlabSpace(3, axis), ds, all_pairs) is None
    for axes in ((0, 1), (0, 2), (1, 2)):
        space = TwoBoxSpace(3, axes, (1, 1))
        arr = pairs_for_space(ds, space)
        pairs = [make_pair(ds, norm, int(a), int(b)) for a, b in arr]
        assert check_well_behaved(space, ds, pairs) is None


def test_rect_space_is_not_well_behaved():
    # smallest elements exist (bounding boxes) but nesting for strongly
    # adjacent pairs fails: composing rectangles from strips/quadrants is
    # what the closest-pair indexes do instead
    from crcp.ranges import RectSpace

    ds = dataset_from([(0, 0), (2, 1), (1, 2)], [0, 1, 1])
    norm = MonotoneNorm(2, 2.0)
    pairs = [make_pair(ds, norm, 0, 1), make_pair(ds, norm, 0, 2)]
    violation = check_well_behaved(RectSpace(), ds, pairs)
    assert violation is not None and "nested" in violation.reason


def test_dominance_and_box_spaces_smallest():
    from crcp.ranges import Box3Space, Dominance3Space

    ds = dataset_from([(1, 5, 2), (3, 0, 4)], [0, 1])
    pair = make_pair(ds, MonotoneNorm(3, 2.0), 0, 1)
    dom = Dominance3Space().smallest(ds, pair)
    assert dom.corner == (1.0, 0.0, 2.0)
    box = Box3Space().smallest(ds, pair)
    assert box.lo == (1.0, 0.0, 2.0) and box.hi == (3.0, 5.0, 4.0)


def test_query_text_roundtrip():
    queries = [
        Strip(0, -1.5, 2.0),
        Strip(1, 0.0, 1.0),
        Quadrant((1, -1), (0.25, -3.0)),
        Rect(0.0, 1.0, -2.0, 2.0),
        Slab(3, 2, 0.5, 0.75),
        TwoBox(3, (0, 2), (1, 1), (0.1, 0.2)),
        Dominance3((0.0, 1.0, 2.0)),
    ]
    for q in queries:
        back = parse_query(format_query(q), 3)
        assert type(back) is type(q)
        assert back.lo == q.lo and back.hi == q.hi


def test_parse_query_errors():
    with pytest.raises(UsageError):
        parse_query("CIRCLE 0 0 1")
    with pytest.raises(UsageError):
        parse_query("STRIP 0 1")


def test_box3_parse():
    q = parse_query("BOX3 0 1 2 3 4 5")
    assert q.lo == (0.0, 2.0, 4.0) and q.hi == (1.0, 3.0, 5.0)

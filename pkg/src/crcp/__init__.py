"""Approximate colored range closest-pair (CRCP) search structures.

Builds (1+eps)-approximate query structures for the closest bichromatic
pair inside orthogonal ranges (strips, quadrants, rectangles, slabs,
two-boxes, 3D dominance regions) under metrics induced by monotone norms,
together with brute-force oracles and a verification harness.
"""

from ._accel import USING_NUMBA, backend_name
from .errors import UsageError, VerificationError
from .geometry import (
    BoundingBox,
    ColoredPoint,
    Dataset,
    MonotoneNorm,
    Orientation,
    PointPair,
    check_norm_equivalence,
    classify_pair,
    load_dataset,
    make_pair,
    norm_distance,
    normalize_axes,
    save_dataset,
    strongly_adjacent,
)
from .ranges import (
    Box3,
    Box3Space,
    Dominance3,
    Dominance3Space,
    OrthoRange,
    Quadrant,
    QuadrantSpace,
    Rect,
    RectSpace,
    Slab,
    SlabSpace,
    Strip,
    StripSpace,
    TwoBox,
    TwoBoxSpace,
    WellBehavedViolation,
    check_well_behaved,
    contains_pair,
    contains_point,
    format_query,
    load_queries,
    parse_query,
    range_subseteq,
    smallest_range,
)
from .coreset import (
    CoresetResult,
    bichromatic_pairs,
    build_coreset,
    kept_pair_gap_violations,
    load_coreset,
    measure_size_growth,
    pairs_for_space,
    save_coreset,
    select_minimal,
    verify_coreset,
)
from .locator import PairLocator, build_locator, query_lightest
from .top2 import Top2Answer, Top2Family, Top2Store, build_top2, query_top2
from .oracle import (
    BenchReport,
    brute_force_anchored,
    brute_force_crcp,
    count_candidate_pairs,
    gen_adversarial_quadrant,
    gen_adversarial_strip,
    gen_random,
    global_closest_bich,
    run_benchmark,
)
from .anchored import (
    AnchoredIndex2D,
    AnchoredIndex3D,
    build_anchored2d,
    build_anchored3d,
    query_anchored2d,
    query_anchored3d,
)
from .structures import (
    Dominance3Index,
    QuadrantIndex,
    RectIndexV1,
    RectIndexV2,
    SlabIndex,
    StripIndex,
    TwoBoxIndex,
    build_index,
)
from .verification import VerifySummary, verify_kind

__version__ = "0.1.0"

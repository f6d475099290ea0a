"""Degenerate inputs: heavy coordinate duplication, axis-aligned pairs,
adversarial datasets, and non-special norm exponents through every kind."""

import numpy as np
import pytest

import crcp
from crcp import MonotoneNorm
from crcp.oracle import gen_adversarial_quadrant, gen_adversarial_strip
from crcp.verification import verify_kind


@pytest.mark.parametrize("trial", range(4))
def test_integer_grid_2d_all_kinds(trial):
    rng = np.random.default_rng(5000 + trial)
    coords = rng.integers(0, 5, (30, 2)).astype(float)
    colors = rng.integers(0, 3, 30).astype(np.int32)
    ds = crcp.Dataset(coords, colors)
    norm = [MonotoneNorm(2, 1.0), MonotoneNorm(2, float("inf"))][trial % 2]
    verify_kind("strip", ds, norm, 0.5)
    verify_kind("quadrant", ds, norm, 0.5)
    verify_kind("rect1", ds, norm, 0.5, seed=trial, rect_count=60)
    verify_kind("rect2", ds, norm, 0.5, seed=trial, rect_count=60)


@pytest.mark.parametrize("trial", range(2))
def test_integer_grid_3d_all_kinds(trial):
    rng = np.random.default_rng(6000 + trial)
    coords = rng.integers(0, 4, (20, 3)).astype(float)
    colors = rng.integers(0, 2, 20).astype(np.int32)
    ds = crcp.Dataset(coords, colors)
    norm = MonotoneNorm(3, 1.0)
    verify_kind("slab", ds, norm, 1.0)
    verify_kind("2box", ds, norm, 1.0)
    verify_kind("dom3", ds, norm, 1.0)


def test_collinear_points():
    # all points on one line: every pair has the "both" orientation
    coords = np.stack([np.arange(12.0), np.zeros(12)], axis=1)
    colors = (np.arange(12) % 2).astype(np.int32)
    ds = crcp.Dataset(coords, colors)
    verify_kind("strip", ds, MonotoneNorm(2, 2.0), 0.5)
    verify_kind("quadrant", ds, MonotoneNorm(2, 2.0), 0.5)
    verify_kind("rect2", ds, MonotoneNorm(2, 2.0), 0.5, rect_count=40)


def test_adversarial_datasets_through_structures():
    norm = MonotoneNorm(2, 2.0)
    verify_kind("strip", gen_adversarial_strip(32), norm, 0.1)
    verify_kind("quadrant", gen_adversarial_quadrant(32), norm, 0.1)


def test_general_exponent_norm_through_structures():
    ds = crcp.gen_random(50, 3, "uniform-box", 2, 77)
    norm = MonotoneNorm(2, 3.0)
    verify_kind("strip", ds, norm, 0.5)
    verify_kind("rect2", ds, norm, 0.5, seed=1, rect_count=60)
    ds3 = crcp.gen_random(14, 2, "uniform-box", 3, 78)
    verify_kind("dom3", ds3, MonotoneNorm(3, 3.0), 1.0)

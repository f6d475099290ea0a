import math

import numpy as np
import pytest

from crcp import Dataset, MonotoneNorm

INF = math.inf


def norms_2d():
    return [
        MonotoneNorm(2, 2.0),
        MonotoneNorm(2, 1.0),
        MonotoneNorm(2, INF),
        MonotoneNorm(2, 1.0, (2.0, 0.5)),
        MonotoneNorm(2, 3.0),
    ]


def norms_3d():
    return [
        MonotoneNorm(3, 2.0),
        MonotoneNorm(3, 1.0),
        MonotoneNorm(3, INF),
        MonotoneNorm(3, 1.0, (2.0, 0.5, 1.5)),
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def dataset_from(coords, colors) -> Dataset:
    return Dataset(np.asarray(coords, dtype=float), np.asarray(colors, dtype=np.int32))

import numpy as np
import pytest

from app.models.shape import TreeShape
from app.services.shape_service import make_shape, shape_from_fmatrix

from .helpers import F_X, F_Y, square


@pytest.fixture
def fig3_tree() -> TreeShape:
    return make_shape((0, 1, 2, 3, 3), (3, 1, 2, 3, 3))


@pytest.fixture
def two_edge_tree() -> TreeShape:
    # N=7, K=5, edges (1,2) and (3,4) present
    return make_shape((0, 1, 1, 3, 3), (1, 2, 0, 2, 2))


@pytest.fixture
def caterpillar4() -> TreeShape:
    return make_shape((0, 1, 2), (1, 1, 2))


@pytest.fixture
def tree_x() -> TreeShape:
    return shape_from_fmatrix(square(F_X))


@pytest.fixture
def tree_y() -> TreeShape:
    return shape_from_fmatrix(square(F_Y))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)

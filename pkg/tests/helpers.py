from functools import lru_cache
from typing import List

from app.models.shape import FMatrix, TreeShape
from app.services.enumeration_service import generate_all

# Binary pair with N=8 whose least upper bound is worked through step by step
F_X = [
    [2],
    [1, 3],
    [0, 2, 4],
    [0, 2, 3, 5],
    [0, 1, 2, 4, 6],
    [0, 1, 2, 4, 5, 7],
    [0, 1, 2, 3, 4, 6, 8],
]
F_Y = F_X[:-1] + [[0, 1, 2, 4, 5, 6, 8]]


def square(rows) -> FMatrix:
    size = len(rows)
    return FMatrix(entries=tuple(tuple(row) + (0,) * (size - len(row)) for row in rows))


@lru_cache(maxsize=None)
def _shapes(n: int) -> tuple:
    return tuple(generate_all(n))


def all_shapes(n: int) -> List[TreeShape]:
    return list(_shapes(n))


def shapes_up_to(n: int) -> List[TreeShape]:
    return [s for m in range(2, n + 1) for s in _shapes(m)]

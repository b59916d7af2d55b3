from typing import Dict, List

from pydantic import BaseModel


class ShapeStats(BaseModel):
    n_tips: int
    K: int
    M: int
    A: float
    block_sizes: List[int]
    cherries: Dict[int, int]


class StatsSummary(BaseModel):
    count: int
    mean_k: float
    median_k: float
    mean_m: float
    median_m: float
    mean_a: float
    median_a: float
    cherry_means: Dict[int, float]
    cherry_scaled: Dict[int, float]

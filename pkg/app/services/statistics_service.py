import logging
from collections import Counter
from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..core.config import settings
from ..core.errors import TreeShapeError
from ..models.shape import TreeShape
from ..models.statistics import ShapeStats, StatsSummary
from .enumeration_service import generate_all
from .shape_service import child_counts

log = logging.getLogger(__name__)


def block_sizes(shape: TreeShape) -> List[int]:
    """Children per internal node, i.e. lineages merged at each event."""
    return [k + l for k, l in zip(child_counts(shape.t), shape.l)]


def shape_stats(shape: TreeShape) -> ShapeStats:
    sizes = block_sizes(shape)
    cherries = Counter(l for k, l in zip(child_counts(shape.t), shape.l) if k == 0)
    return ShapeStats(
        n_tips=shape.n_tips,
        K=shape.n_internal,
        M=max(sizes),
        A=(shape.n_tips + shape.n_internal - 1) / shape.n_internal,
        block_sizes=sizes,
        cherries=dict(sorted(cherries.items())),
    )


def lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return float(ordered[(len(ordered) - 1) // 2])


def cherry_sizes(cherry_max: Optional[int] = None) -> List[int]:
    cherry_max = settings.cherry_max if cherry_max is None else cherry_max
    return list(range(2, cherry_max + 1))


def aggregate(samples: Iterable[ShapeStats], cherry_max: Optional[int] = None) -> StatsSummary:
    stats = list(samples)
    if not stats:
        raise TreeShapeError("cannot summarise an empty sample")
    sizes = cherry_sizes(cherry_max)
    k = np.array([s.K for s in stats], dtype=float)
    m = np.array([s.M for s in stats], dtype=float)
    a = np.array([s.A for s in stats], dtype=float)
    n = np.array([s.n_tips for s in stats], dtype=float)
    cherry = {size: np.array([s.cherries.get(size, 0) for s in stats], dtype=float) for size in sizes}
    return StatsSummary(
        count=len(stats),
        mean_k=float(k.mean()),
        median_k=lower_median(k),
        mean_m=float(m.mean()),
        median_m=lower_median(m),
        mean_a=float(a.mean()),
        median_a=lower_median(a),
        cherry_means={size: float(c.mean()) for size, c in cherry.items()},
        cherry_scaled={size: float((c / n).mean()) for size, c in cherry.items()},
    )


def stats_header(cherry_max: Optional[int] = None) -> List[str]:
    return ["n", "k", "max_block", "avg_block"] + [f"cherry_{m}" for m in cherry_sizes(cherry_max)]


def stats_rows(stats: Iterable[ShapeStats], cherry_max: Optional[int] = None) -> List[List[object]]:
    sizes = cherry_sizes(cherry_max)
    return [
        [s.n_tips, s.K, s.M, s.A] + [s.cherries.get(m, 0) for m in sizes]
        for s in stats
    ]


def exhaustive_summary(N: int, cherry_max: Optional[int] = None) -> StatsSummary:
    """Equal-weight summary over all of MT_N, the target of a uniform sampler."""
    return aggregate((shape_stats(s) for s in generate_all(N)), cherry_max)

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import betaln, gammaln, logsumexp

from ..core.config import settings
from ..core.errors import TreeShapeError
from ..models.coalescent import LambdaBeta
from ..models.shape import TreeShape
from .chain_service import chain_streams
from .shape_service import trusted_shape

log = logging.getLogger(__name__)

_LEAF = -1


def log_merger_rate(b: int, k: int, measure: LambdaBeta) -> float:
    if not 2 <= k <= b:
        raise TreeShapeError(f"merger size k={k} must lie in 2..{b}")
    return float(betaln(k - 2 + measure.a, b - k + measure.b) - betaln(measure.a, measure.b))


def merger_rate(b: int, k: int, measure: LambdaBeta) -> float:
    """Rate at which a given k of b lineages merge: integral of x^(k-2) (1-x)^(b-k) Lambda(dx)."""
    return math.exp(log_merger_rate(b, k, measure))


@lru_cache(maxsize=4096)
def _merger_weights(b: int, a: float, beta: float) -> Tuple[float, ...]:
    k = np.arange(2, b + 1)
    log_binom = gammaln(b + 1) - gammaln(k + 1) - gammaln(b - k + 1)
    log_rate = betaln(k - 2 + a, b - k + beta) - betaln(a, beta)
    log_w = log_binom + log_rate
    return tuple(np.exp(log_w - logsumexp(log_w)).tolist())


@lru_cache(maxsize=4096)
def _merger_cdf(b: int, a: float, beta: float) -> np.ndarray:
    return np.cumsum(_merger_weights(b, a, beta))


def merger_distribution(b: int, measure: LambdaBeta) -> np.ndarray:
    """P(next merger has size k) for k = 2..b, proportional to C(b, k) * rate(b, k)."""
    if b < 2:
        raise TreeShapeError(f"need at least two lineages, got {b}")
    return np.asarray(_merger_weights(b, measure.a, measure.b))


def sample_topology(
    N: int,
    measure: LambdaBeta,
    rng: np.random.Generator,
    pairwise_only: bool = False,
) -> TreeShape:
    """Ranked shape of one Lambda-coalescent genealogy; branch lengths are not drawn."""
    if N < 2:
        raise TreeShapeError(f"N must be at least 2, got {N}")
    # each lineage is a leaf or the index of the event that created it
    lineages: List[int] = [_LEAF] * N
    events: List[Tuple[List[int], int]] = []
    while len(lineages) > 1:
        b = len(lineages)
        if pairwise_only:
            k = 2
        else:
            cdf = _merger_cdf(b, measure.a, measure.b)
            k = 2 + min(int(np.searchsorted(cdf, rng.random(), side="right")), b - 2)
        chosen = set(rng.choice(b, size=k, replace=False).tolist())
        merged = [lineages[i] for i in chosen]
        events.append(([e for e in merged if e != _LEAF], merged.count(_LEAF)))
        lineages = [x for i, x in enumerate(lineages) if i not in chosen]
        lineages.append(len(events) - 1)

    K = len(events)
    t = [0] * K
    l = [0] * K
    # the last merger is the root, rank 1
    for index, (children, leaves) in enumerate(events):
        rank = K - index
        l[rank - 1] = leaves
        for child in children:
            t[K - child - 1] = rank
    return trusted_shape(t, l)


def _sample_chunk(
    N: int, measure: LambdaBeta, rng: np.random.Generator, size: int, pairwise_only: bool
) -> List[TreeShape]:
    return [sample_topology(N, measure, rng, pairwise_only) for _ in range(size)]


def sample_batch(
    N: int,
    measure: LambdaBeta,
    count: int,
    seed: int,
    threads: Optional[int] = None,
    pairwise_only: bool = False,
    chunk: Optional[int] = None,
) -> List[TreeShape]:
    """``count`` shapes from fixed-size chunks, one RNG stream per chunk, so threads never change the output."""
    threads = settings.threads if threads is None else threads
    chunk = settings.coalescent_chunk if chunk is None else chunk
    sizes = [min(chunk, count - start) for start in range(0, count, chunk)]
    streams = chain_streams(seed, len(sizes))
    jobs = [(N, measure, rng, size, pairwise_only) for rng, size in zip(streams, sizes)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda job: _sample_chunk(*job), jobs))
    else:
        chunks = [_sample_chunk(*job) for job in jobs]
    log.debug("Sampled %d coalescent shapes with N=%d in %d chunks", count, N, len(sizes))
    return [shape for part in chunks for shape in part]

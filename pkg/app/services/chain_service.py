import logging
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..core.config import settings
from ..core.errors import TreeShapeError
from ..models.chain import ChainKind, ChainRun, ChainSample, ChainSpec, ChainState
from ..models.shape import FMatrix, TreeShape
from .lattice_service import (
    internal_children,
    max_degree_tree,
    present_edges,
    split_node,
    total_degree,
    u_value,
)
from .shape_service import collapse_edge, shape_from_fmatrix, star_tree

log = logging.getLogger(__name__)

Stepper = Callable[[ChainState, np.random.Generator], ChainState]


@lru_cache(maxsize=None)
def max_total_degree(N: int) -> int:
    return max_degree_tree(N)[1]


def _neighbor_at(shape: TreeShape, index: int, rng: np.random.Generator) -> TreeShape:
    """Neighbour number ``index`` in the order (covers by edge, then refinements by node).

    Within a node the split is drawn uniformly by rejection, so a uniform ``index``
    gives a uniform neighbour without listing all of them.
    """
    edges = present_edges(shape)
    if index < len(edges):
        return collapse_edge(shape, edges[index])
    index -= len(edges)
    for node, kids in enumerate(internal_children(shape), start=1):
        leaves = shape.l[node - 1]
        weight = u_value(len(kids), leaves)
        if index >= weight:
            index -= weight
            continue
        size = len(kids) + leaves
        while True:
            mask = rng.random(len(kids)) < 0.5
            j = int(rng.integers(leaves + 1))
            moved = [kid for kid, take in zip(kids, mask) if take]
            if 2 <= len(moved) + j <= size - 1:
                return split_node(shape, node, moved, j)
    raise TreeShapeError(f"neighbour index out of range for {shape}")


def sample_neighbor(shape: TreeShape, rng: np.random.Generator) -> TreeShape:
    degree = total_degree(shape)
    if degree == 0:
        raise TreeShapeError(f"{shape} has no neighbours")
    return _neighbor_at(shape, int(rng.integers(degree)), rng)


def _advance(state: ChainState, shape: TreeShape) -> ChainState:
    state.current = shape
    state.step += 1
    return state


def step_symmetric(state: ChainState, rng: np.random.Generator) -> ChainState:
    m_n = max_total_degree(state.current.n_tips)
    index = int(rng.integers(m_n))
    # indices past the degree are the self-loop mass 1 - deg/M_N
    if index < total_degree(state.current):
        return _advance(state, _neighbor_at(state.current, index, rng))
    return _advance(state, state.current)


def step_random_walk(state: ChainState, rng: np.random.Generator) -> ChainState:
    return _advance(state, sample_neighbor(state.current, rng))


def step_mh_uniform(state: ChainState, rng: np.random.Generator) -> ChainState:
    proposal = sample_neighbor(state.current, rng)
    ratio = total_degree(state.current) / total_degree(proposal)
    state.proposed += 1
    if rng.random() < ratio:
        state.accepted += 1
        return _advance(state, proposal)
    return _advance(state, state.current)


_STEPPERS = {
    ChainKind.SYMMETRIC: step_symmetric,
    ChainKind.RANDOM_WALK: step_random_walk,
    ChainKind.METROPOLIS: step_mh_uniform,
}


def stepper(spec: ChainSpec) -> Stepper:
    base = _STEPPERS[spec.kind]
    if not spec.lazy:
        return base

    def lazy_step(state: ChainState, rng: np.random.Generator) -> ChainState:
        if rng.random() < 0.5:
            return _advance(state, state.current)
        return base(state, rng)

    return lazy_step


def semi_random_init(N: int, K: int, rng: np.random.Generator) -> TreeShape:
    """Random valid F-matrix from a random diagonal, each column falling by one per row until zero."""
    if not 1 <= K <= N - 1:
        raise TreeShapeError(f"K must lie in 1..{N - 1}, got {K}")
    if K == 1:
        return star_tree(N)
    picks = rng.choice(np.arange(2, N), size=K - 1, replace=False)
    diagonal = sorted(int(v) for v in picks) + [N]
    rows = [[0] * K for _ in range(K)]
    for j, value in enumerate(diagonal):
        rows[j][j] = value
        for i in range(j + 1, K):
            rows[i][j] = max(0, rows[i - 1][j] - 1)
    return shape_from_fmatrix(FMatrix(entries=tuple(tuple(row) for row in rows)))


def chain_streams(seed: int, n_streams: int) -> List[np.random.Generator]:
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(n_streams)]


def _run_one(
    spec: ChainSpec,
    chain: int,
    rng: np.random.Generator,
    n_steps: int,
    thinning: int,
    init: Optional[TreeShape],
) -> Tuple[List[ChainSample], Optional[float]]:
    N = spec.n_tips
    start = init if init is not None else semi_random_init(N, chain % (N - 1) + 1, rng)
    state = ChainState(current=start, stream=chain)
    advance = stepper(spec)
    samples = []
    for _ in range(n_steps):
        advance(state, rng)
        if state.step % thinning == 0:
            samples.append(ChainSample(chain=chain, step=state.step, shape=state.current))
    log.debug("Chain %d finished %d steps (acceptance %s)", chain, n_steps, state.acceptance_rate)
    return samples, state.acceptance_rate


def run_chains(
    spec: ChainSpec,
    n_chains: int,
    n_steps: int,
    seed: int,
    init: Optional[TreeShape] = None,
    thinning: Optional[int] = None,
    threads: Optional[int] = None,
) -> ChainRun:
    """Run independent chains, one RNG stream per chain index; output order never depends on ``threads``."""
    thinning = settings.thinning if thinning is None else thinning
    threads = settings.threads if threads is None else threads
    if thinning < 1 or n_chains < 1 or n_steps < 0:
        raise TreeShapeError("chains and thinning must be positive and steps nonnegative")
    if spec.n_tips < 3:
        raise TreeShapeError(f"chains need N >= 3, got {spec.n_tips}")
    if init is not None and init.n_tips != spec.n_tips:
        raise TreeShapeError(f"initial shape has N={init.n_tips}, chain expects N={spec.n_tips}")
    if spec.kind == ChainKind.SYMMETRIC:
        max_total_degree(spec.n_tips)

    streams = chain_streams(seed, n_chains)
    jobs = [(spec, c, streams[c], n_steps, thinning, init) for c in range(n_chains)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _run_one(*job), jobs))
    else:
        results = [_run_one(*job) for job in jobs]

    samples = [sample for chain_samples, _ in results for sample in chain_samples]
    return ChainRun(
        spec=spec,
        n_chains=n_chains,
        n_steps=n_steps,
        thinning=thinning,
        seed=seed,
        samples=samples,
        acceptance=[rate for _, rate in results],
    )


def pooled_acceptance(run: ChainRun) -> Optional[float]:
    rates = [r for r in run.acceptance if r is not None]
    if not rates:
        return None
    return float(np.mean(rates))

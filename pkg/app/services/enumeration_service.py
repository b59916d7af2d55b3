import logging
import math
from collections import Counter
from functools import lru_cache
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from sympy.functions.combinatorial.numbers import stirling

from ..core.config import settings
from ..core.errors import CapExceeded, TreeShapeError
from ..models.enumeration import CountResult, CountRow, GrowthRow, PairTable
from ..models.shape import TreeShape
from .shape_service import child_counts, trusted_shape

log = logging.getLogger(__name__)

Pair = Tuple[int, int]


def binom(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def k0_k1(t: Sequence[int]) -> Pair:
    counts = Counter(child_counts(t))
    return counts.get(0, 0), counts.get(1, 0)


def valid_pairs(K: int) -> Set[Pair]:
    if K < 2:
        raise TreeShapeError(f"valid (k0, k1) pairs need K >= 2, got {K}")
    if K == 2:
        return {(1, 1)}
    pairs = {(1, K - 1), (K - 1, 0)}
    for k0 in range(2, K - 1):
        for k1 in range(max(0, K - 2 * k0 + 1), K - k0):
            pairs.add((k0, k1))
    return pairs


@lru_cache(maxsize=None)
def _pair_entries(K: int) -> Tuple[Tuple[Pair, int], ...]:
    # lru_cache results are write-once, so concurrent readers are safe
    if K == 2:
        return (((1, 1), 1),)
    previous = dict(_pair_entries(K - 1))
    entries = []
    for k0, k1 in sorted(valid_pairs(K)):
        value = (
            previous.get((k0 - 1, k1), 0) * (K - k0 - k1)
            + previous.get((k0 - 1, k1 + 1), 0) * (k1 + 1)
            + previous.get((k0, k1 - 1), 0) * k0
        )
        entries.append(((k0, k1), value))
    return tuple(entries)


def pair_table(K: int) -> PairTable:
    if K < 2:
        raise TreeShapeError(f"pair table needs K >= 2, got {K}")
    return PairTable(K=K, entries=dict(_pair_entries(K)))


def eulerian_number(n: int, m: int) -> int:
    """Permutations of n elements with exactly m ascents."""
    if n == 0:
        return 1 if m == 0 else 0
    if m < 0 or m >= n:
        return 0
    return sum((-1) ** j * math.comb(n + 1, j) * (m + 1 - j) ** n for j in range(m + 2))


def row_sums(table: PairTable) -> Dict[int, int]:
    """B_K(k0): the table summed over k1."""
    sums: Dict[int, int] = {}
    for (k0, _), value in table.entries.items():
        sums[k0] = sums.get(k0, 0) + value
    return dict(sorted(sums.items()))


def count_shapes(N: int, K: int) -> CountResult:
    if N < 2 or not 1 <= K <= N - 1:
        return CountResult(N=N, K=K, value=0, in_range=False)
    if K == 1:
        return CountResult(N=N, K=K, value=1)
    value = sum(
        a * binom(N - 2 * k0 - k1 + K - 1, K - 1)
        for (k0, k1), a in _pair_entries(K)
    )
    return CountResult(N=N, K=K, value=value)


def count_space(N: int) -> CountResult:
    if N < 2:
        raise TreeShapeError(f"N must be at least 2, got {N}")
    total = sum(count_shapes(N, K).value for K in range(1, N))
    return CountResult(N=N, K=N - 1, value=total)


def euler_zigzag(n: int) -> int:
    """Ranked binary shapes with n + 1 tips."""
    return count_shapes(n + 1, n).value


@lru_cache(maxsize=None)
def count_labeled_ranked(N: int) -> int:
    if N < 1:
        raise TreeShapeError(f"N must be at least 1, got {N}")
    if N == 1:
        return 1
    return sum(int(stirling(N, k)) * count_labeled_ranked(k) for k in range(1, N))


def count_labeled_binary(N: int) -> int:
    if N < 1:
        raise TreeShapeError(f"N must be at least 1, got {N}")
    return math.factorial(N) * math.factorial(N - 1) // 2 ** (N - 1)


def count_table(n_values: Sequence[int]) -> List[CountRow]:
    rows = []
    for N in n_values:
        by_k = {K: count_shapes(N, K).value for K in range(1, N)}
        rows.append(CountRow(N=N, by_k=by_k, total=sum(by_k.values())))
    return rows


def growth_table(n_values: Sequence[int]) -> List[GrowthRow]:
    rows = []
    for N in n_values:
        total = count_space(N).value
        rows.append(
            GrowthRow(
                N=N,
                total=total,
                log_total=math.log(total),
                n_log_n=N * math.log(N),
                labeled_ranked=count_labeled_ranked(N),
                labeled_binary=count_labeled_binary(N),
            )
        )
    return rows


def _compositions(total: int, lower: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Vectors x >= lower with sum(x) == total, lexicographically ascending."""
    if len(lower) == 1:
        if total >= lower[0]:
            yield (total,)
        return
    rest = sum(lower[1:])
    for first in range(lower[0], total - rest + 1):
        for tail in _compositions(total - first, lower[1:]):
            yield (first,) + tail


def _rank_vectors(K: int) -> Iterator[Tuple[int, ...]]:
    for tail in product(*(range(1, i) for i in range(2, K + 1))):
        yield (0,) + tail


def _generate_k(N: int, K: int) -> Iterator[TreeShape]:
    for t in _rank_vectors(K):
        lower = [2 if k == 0 else 1 if k == 1 else 0 for k in child_counts(t)]
        if sum(lower) > N:
            continue
        for l in _compositions(N, lower):
            yield trusted_shape(t, l)


def generate_all(N: int, K: Optional[int] = None, cap: Optional[int] = None) -> Iterator[TreeShape]:
    """Every shape of MT_N (or of one K) exactly once, ordered by (t, l)."""
    cap = settings.exhaustive_cap if cap is None else cap
    if N > cap:
        raise CapExceeded(N, cap)
    if N < 2:
        raise TreeShapeError(f"N must be at least 2, got {N}")
    if K is not None:
        if not 1 <= K <= N - 1:
            return iter(())
        return _generate_k(N, K)
    shapes = [shape for k in range(1, N) for shape in _generate_k(N, k)]
    shapes.sort(key=lambda s: (s.t, s.l))
    log.debug("Generated %d shapes for N=%d", len(shapes), N)
    return iter(shapes)

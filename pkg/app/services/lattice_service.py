import logging
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx

from ..core.config import settings
from ..core.errors import StructuralError, TreeShapeError
from ..models.lattice import DegreeProfile, LatticeGraph
from ..models.shape import FMatrix, TreeShape
from .enumeration_service import generate_all
from .shape_service import (
    child_counts,
    collapse_edge,
    make_shape,
    serialize,
    shape_fmatrix,
    shape_from_fmatrix,
    trusted_shape,
    validate_fmatrix,
)

log = logging.getLogger(__name__)


def present_edges(shape: TreeShape) -> List[int]:
    return [e for e in range(1, shape.n_internal) if shape.t[e] == e]


def present_edges_f(F: FMatrix) -> List[int]:
    rows = F.entries
    return [
        e
        for e in range(1, F.size)
        if all(rows[e - 1][j] == rows[e][j] for j in range(e - 1))
    ]


def covers(shape: TreeShape) -> Set[TreeShape]:
    return {collapse_edge(shape, e) for e in present_edges(shape)}


def u_value(k: int, l: int) -> int:
    """Ways to split one node with k internal and l leaf children into two consecutive events."""
    return (l + 1) * 2**k - k - 3 + (1 if l == 0 else 0)


def split_node(shape: TreeShape, node: int, moved: Sequence[int], leaves: int) -> TreeShape:
    """Insert a node at rank node+1 under ``node`` taking the internal children ``moved`` and ``leaves`` leaves."""
    t, l = shape.t, shape.l
    K = len(t)
    moved_set = set(moved)

    def shift(rank: int) -> int:
        return rank + 1 if rank > node else rank

    new_t = [0] * (K + 1)
    new_l = [0] * (K + 1)
    for rank in range(1, K + 1):
        target = shift(rank)
        parent = t[rank - 1]
        new_t[target - 1] = node + 1 if rank in moved_set else (shift(parent) if parent else 0)
        new_l[target - 1] = l[rank - 1]
    new_t[node] = node
    new_l[node] = leaves
    new_l[node - 1] -= leaves
    return trusted_shape(new_t, new_l)


def internal_children(shape: TreeShape) -> List[List[int]]:
    children: List[List[int]] = [[] for _ in range(shape.n_internal)]
    for rank in range(2, shape.n_internal + 1):
        children[shape.t[rank - 1] - 1].append(rank)
    return children


def refinements_below(shape: TreeShape) -> Set[TreeShape]:
    below: Set[TreeShape] = set()
    for node, kids in enumerate(internal_children(shape), start=1):
        leaves = shape.l[node - 1]
        size = len(kids) + leaves
        for r in range(len(kids) + 1):
            for moved in combinations(kids, r):
                for j in range(leaves + 1):
                    if 2 <= r + j <= size - 1:
                        below.add(split_node(shape, node, moved, j))
    return below


def degree_profile(shape: TreeShape) -> DegreeProfile:
    children = list(zip(child_counts(shape.t), shape.l))
    u_values = [u_value(k, l) for k, l in children]
    return DegreeProfile(
        children=children,
        u_values=u_values,
        deg_plus=len(present_edges(shape)),
        deg_minus=sum(u_values),
    )


def deg_plus(shape: TreeShape) -> int:
    return len(present_edges(shape))


def deg_minus(shape: TreeShape) -> int:
    return sum(u_value(k, l) for k, l in zip(child_counts(shape.t), shape.l))


def total_degree(shape: TreeShape) -> int:
    return deg_plus(shape) + deg_minus(shape)


def max_degree_tree(N: int) -> Tuple[TreeShape, int]:
    """The cherry-fan tree and M_N, the maximum total degree over MT_N."""
    if N < 4:
        raise TreeShapeError(f"max-degree tree needs N >= 4, got {N}")
    cherries = (N - 2) // 2
    shape = make_shape((0,) + (1,) * cherries, (2 + N % 2,) + (2,) * cherries)
    return shape, 1 + deg_minus(shape)


def degree_one_binary(N: int) -> TreeShape:
    """Binary tree with edges (1,2) and (i, i+2); its only neighbour is one collapse away."""
    if N < 4:
        raise TreeShapeError(f"degree-one binary tree needs N >= 4, got {N}")
    t = (0, 1) + tuple(range(1, N - 2))
    l = (0,) + (1,) * (N - 4) + (2, 2)
    return make_shape(t, l)


def _check_same_n(a: TreeShape, b: TreeShape) -> None:
    if a.n_tips != b.n_tips:
        raise TreeShapeError(f"shapes have different tip counts ({a.n_tips} and {b.n_tips})")


def _submatrix(rows: Sequence[Sequence[int]], keep: Sequence[int]) -> List[List[int]]:
    return [[rows[i][j] for j in keep] for i in keep]


def _as_fmatrix(rows: List[List[int]]) -> FMatrix:
    return FMatrix(entries=tuple(tuple(row) for row in rows))


def _column_drops(rows: List[List[int]]) -> List[int]:
    # columns whose entries fall by 2 or more between consecutive rows, from the diagonal down
    return [
        j
        for j in range(len(rows))
        if any(rows[i][j] - rows[i + 1][j] >= 2 for i in range(j, len(rows) - 1))
    ]


def lub_trace(a: TreeShape, b: TreeShape) -> List[FMatrix]:
    """Matrices visited by the LUB reduction, ending with the F-matrix of the least upper bound."""
    _check_same_n(a, b)
    fa, fb = shape_fmatrix(a).entries, shape_fmatrix(b).entries
    diag_a = {fa[i][i] for i in range(len(fa))}
    diag_b = {fb[i][i] for i in range(len(fb))}
    A = _submatrix(fa, [i for i in range(len(fa)) if fa[i][i] in diag_b])
    B = _submatrix(fb, [i for i in range(len(fb)) if fb[i][i] in diag_a])

    size = len(A)
    same = [j for j in range(size) if all(A[i][j] == B[i][j] for i in range(j, size))]
    current = _submatrix(A, same)
    trace = [_as_fmatrix(current)]

    while True:
        bad = set(_column_drops(current))
        if not bad:
            break
        current = _submatrix(current, [j for j in range(len(current)) if j not in bad])
        trace.append(_as_fmatrix(current))
    return trace


def lub(a: TreeShape, b: TreeShape) -> TreeShape:
    if a == b:
        return a
    final = lub_trace(a, b)[-1]
    result = validate_fmatrix(final.entries)
    if not result.ok:
        raise StructuralError(f"LUB reduction produced an invalid F-matrix ({result.constraint})")
    return shape_from_fmatrix(final)


def refines(a: TreeShape, b: TreeShape) -> bool:
    """True when a <= b, i.e. b is reached from a by collapsing edges."""
    return lub(a, b) == b


def lattice_distance(a: TreeShape, b: TreeShape) -> int:
    join = lub(a, b)
    return (a.n_internal - join.n_internal) + (b.n_internal - join.n_internal)


def build_hasse(N: int, cap: Optional[int] = None) -> LatticeGraph:
    cap = settings.exhaustive_cap if cap is None else cap
    vertices = list(generate_all(N, cap=cap))
    index = {shape: i for i, shape in enumerate(vertices)}
    up_edges: Dict[int, List[int]] = {}
    in_degree = [0] * len(vertices)
    for i, shape in enumerate(vertices):
        targets = sorted(index[c] for c in covers(shape))
        up_edges[i] = targets
        for j in targets:
            in_degree[j] += 1
    degrees = [(len(up_edges[i]), in_degree[i]) for i in range(len(vertices))]
    graph = LatticeGraph(n_tips=N, vertices=vertices, up_edges=up_edges, degrees=degrees)
    log.debug("Built Hasse graph for N=%d: %d vertices, %d edges", N, len(vertices), graph.edge_count)
    return graph


def to_networkx(g: LatticeGraph) -> nx.DiGraph:
    """Directed from each shape to the shapes covering it."""
    graph = nx.DiGraph()
    for i, shape in enumerate(g.vertices):
        graph.add_node(i, shape=shape, K=shape.n_internal)
    for i, targets in g.up_edges.items():
        graph.add_edges_from((i, j) for j in targets)
    return graph


def diameter(g: LatticeGraph) -> int:
    return nx.diameter(to_networkx(g).to_undirected())


def hasse_edges(g: LatticeGraph) -> List[Tuple[str, str]]:
    """(covering shape, covered shape) pairs in the compact text form."""
    return [
        (serialize(g.vertices[j]), serialize(g.vertices[i]))
        for i, targets in sorted(g.up_edges.items())
        for j in targets
    ]


def glb(g: LatticeGraph, a: TreeShape, b: TreeShape) -> Optional[TreeShape]:
    """Greatest lower bound read off an explicit Hasse graph; None stands for the bottom element."""
    _check_same_n(a, b)
    graph = to_networkx(g)
    index = g.index()
    ia, ib = index[a], index[b]
    common = (nx.ancestors(graph, ia) | {ia}) & (nx.ancestors(graph, ib) | {ib})
    for candidate in common:
        if common <= nx.ancestors(graph, candidate) | {candidate}:
            return g.vertices[candidate]
    return None

from itertools import combinations, product

import networkx as nx
import numpy as np
import pytest

from app.core.errors import CapExceeded, TreeShapeError
from app.services.enumeration_service import count_space
from app.services.lattice_service import (
    build_hasse,
    covers,
    deg_minus,
    deg_plus,
    degree_one_binary,
    degree_profile,
    diameter,
    glb,
    hasse_edges,
    lattice_distance,
    lub,
    lub_trace,
    max_degree_tree,
    present_edges,
    present_edges_f,
    refinements_below,
    refines,
    to_networkx,
    total_degree,
    u_value,
)
from app.services.shape_service import is_binary, make_shape, shape_fmatrix, star_tree

from .helpers import all_shapes, shapes_up_to

S = make_shape((0,), (4,))
A = make_shape((0, 1), (1, 3))
B = make_shape((0, 1), (2, 2))
C = make_shape((0, 1, 1), (0, 2, 2))
D = make_shape((0, 1, 2), (1, 1, 2))


def brute_force_lub(g, a, b):
    graph = to_networkx(g)
    index = g.index()
    ia, ib = index[a], index[b]
    common = (nx.descendants(graph, ia) | {ia}) & (nx.descendants(graph, ib) | {ib})
    least = [c for c in common if common <= nx.descendants(graph, c) | {c}]
    assert len(least) == 1
    return g.vertices[least[0]]


class TestEdgesAndNeighbours:
    def test_present_edges(self, two_edge_tree):
        assert present_edges(two_edge_tree) == [1, 3]
        assert present_edges(star_tree(5)) == []

    def test_matrix_edge_condition_agrees(self):
        for shape in shapes_up_to(7):
            assert present_edges_f(shape_fmatrix(shape)) == present_edges(shape)

    def test_covers_of_two_edge_tree(self, two_edge_tree):
        above = covers(two_edge_tree)
        assert len(above) == 2
        assert make_shape((0, 1, 1, 3), (1, 2, 2, 2)) in above
        assert all(c.n_internal == 4 for c in above)

    def test_star_has_no_covers(self):
        assert covers(star_tree(6)) == set()

    @pytest.mark.parametrize("n", [4, 5, 8, 12])
    def test_star_refinements(self, n):
        below = refinements_below(star_tree(n))
        assert len(below) == n - 2
        assert {s.l for s in below} == {(n - j, j) for j in range(2, n)}

    def test_binary_has_no_refinements(self, tree_x):
        assert refinements_below(tree_x) == set()

    def test_covers_and_refinements_are_dual(self):
        for shape in shapes_up_to(6):
            for finer in refinements_below(shape):
                assert finer.n_tips == shape.n_tips
                assert shape in covers(finer)
            for coarser in covers(shape):
                assert shape in refinements_below(coarser)


class TestDegrees:
    def test_u_zero_cases(self):
        assert u_value(1, 1) == 0
        assert u_value(2, 0) == 0
        assert u_value(0, 2) == 0

    def test_star_degrees(self):
        star = star_tree(9)
        assert deg_plus(star) == 0
        assert deg_minus(star) == 7

    def test_profile_matches_neighbour_sets(self):
        for shape in shapes_up_to(7):
            profile = degree_profile(shape)
            assert profile.deg_plus == len(covers(shape))
            assert profile.deg_minus == len(refinements_below(shape))
            assert profile.total == total_degree(shape)

    def test_binary_backwards_degree_is_zero(self):
        for shape in all_shapes(7):
            if is_binary(shape):
                assert deg_minus(shape) == 0

    def test_max_degree_sequence(self):
        results = [max_degree_tree(n) for n in range(4, 10)]
        assert [deg_minus(shape) for shape, _ in results] == [2, 4, 7, 11, 18, 26]
        assert [m for _, m in results] == [3, 5, 8, 12, 19, 27]
        assert all(deg_plus(shape) == 1 for shape, _ in results)

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8, pytest.param(9, marks=pytest.mark.slow)])
    def test_max_degree_tree_is_argmax(self, n):
        shape, m_n = max_degree_tree(n)
        best = max(total_degree(s) for s in all_shapes(n))
        assert best == m_n
        assert total_degree(shape) == m_n

    def test_small_n_refused(self):
        with pytest.raises(TreeShapeError):
            max_degree_tree(3)

    @pytest.mark.parametrize("n", [4, 5, 6, 9, 15])
    def test_degree_one_binary(self, n):
        shape = degree_one_binary(n)
        assert is_binary(shape)
        assert shape.n_tips == n
        assert total_degree(shape) == 1


class TestLub:
    def test_reduction_trace(self, tree_x, tree_y):
        trace = lub_trace(tree_x, tree_y)
        assert [F.rows() for F in trace] == [
            [(2,), (1, 3), (0, 2, 4), (0, 1, 2, 7), (0, 1, 2, 6, 8)],
            [(2,), (1, 3), (0, 1, 7), (0, 1, 6, 8)],
            [(2,), (0, 7), (0, 6, 8)],
            [(7,), (6, 8)],
        ]

    def test_worked_example(self, tree_x, tree_y):
        join = lub(tree_x, tree_y)
        assert shape_fmatrix(join).entries == ((7, 0), (6, 8))
        assert lub(tree_y, tree_x) == join

    def test_identity_and_star(self, fig3_tree):
        assert lub(fig3_tree, fig3_tree) == fig3_tree
        assert lub(fig3_tree, star_tree(12)) == star_tree(12)

    def test_different_n(self, fig3_tree):
        with pytest.raises(TreeShapeError):
            lub(fig3_tree, star_tree(5))

    def test_n4_table(self):
        assert lub(A, B) == S
        assert lub(C, D) == B
        assert lub(C, A) == S
        assert lub(D, A) == A

    @pytest.mark.parametrize("n", [3, 4, 5, pytest.param(6, marks=pytest.mark.slow)])
    def test_matches_reachability_order(self, n):
        g = build_hasse(n)
        for a, b in combinations(g.vertices, 2):
            assert lub(a, b) == brute_force_lub(g, a, b), (a, b)

    def test_refines(self, tree_x, tree_y):
        assert refines(tree_x, star_tree(8))
        assert refines(D, A)
        assert not refines(A, D)
        assert not refines(tree_x, tree_y)


class TestDistance:
    def test_zero_on_diagonal(self, fig3_tree):
        assert lattice_distance(fig3_tree, fig3_tree) == 0

    def test_binary_to_star(self):
        for shape in all_shapes(7):
            if is_binary(shape):
                assert lattice_distance(shape, star_tree(7)) == 5

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_metric_properties(self, n):
        shapes = all_shapes(n)
        d = np.array([[lattice_distance(a, b) for b in shapes] for a in shapes])
        assert np.array_equal(d, d.T)
        assert np.array_equal(d == 0, np.eye(len(shapes), dtype=bool))
        # d[a, c] <= d[a, b] + d[b, c] for every triple
        assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :])

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_bounds(self, n):
        for a, b in product(all_shapes(n), repeat=2):
            d = lattice_distance(a, b)
            assert abs(a.n_internal - b.n_internal) <= d <= a.n_internal + b.n_internal - 2


class TestHasse:
    def test_n4_graph(self):
        g = build_hasse(4)
        assert g.vertices == [S, A, B, C, D]
        assert g.up_edges == {0: [], 1: [0], 2: [0], 3: [2], 4: [1, 2]}
        assert [up + down for up, down in g.degrees] == [2, 2, 3, 1, 2]
        assert g.edge_count == 5

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
    def test_counts_and_degrees(self, n):
        g = build_hasse(n)
        assert len(g.vertices) == count_space(n).value
        assert g.edge_count == sum(deg_plus(v) for v in g.vertices) == sum(deg_minus(v) for v in g.vertices)
        for shape, (up, down) in zip(g.vertices, g.degrees):
            assert (up, down) == (deg_plus(shape), deg_minus(shape))
        assert nx.is_weakly_connected(to_networkx(g))

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
    def test_order_is_acyclic(self, n):
        g = build_hasse(n)
        assert nx.is_directed_acyclic_graph(to_networkx(g))
        for i, targets in g.up_edges.items():
            assert all(g.vertices[j].n_internal == g.vertices[i].n_internal - 1 for j in targets)

    @pytest.mark.parametrize("n", [4, 5])
    def test_order_is_antisymmetric_and_matches_reachability(self, n):
        g = build_hasse(n)
        graph = to_networkx(g)
        for i, a in enumerate(g.vertices):
            above = nx.descendants(graph, i) | {i}
            for j, b in enumerate(g.vertices):
                assert refines(a, b) == (j in above), (a, b)
                if i != j:
                    assert not (refines(a, b) and refines(b, a))

    def test_every_vertex_reaches_star(self):
        g = build_hasse(6)
        graph = to_networkx(g)
        star = g.index()[star_tree(6)]
        assert all(star in nx.descendants(graph, i) for i in range(len(g.vertices)) if i != star)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            build_hasse(10)
        assert len(build_hasse(4, cap=4).vertices) == 5

    def test_n4_diameter(self):
        assert diameter(build_hasse(4)) == 3

    @pytest.mark.parametrize("n", [5, 6, 7])
    def test_diameter_lower_bound(self, n):
        assert diameter(build_hasse(n)) >= 2 * (n - 3)

    def test_binary_to_star_distance(self):
        g = build_hasse(6)
        graph = to_networkx(g).to_undirected()
        index = g.index()
        lengths = nx.single_source_shortest_path_length(graph, index[star_tree(6)])
        for shape in g.vertices:
            if is_binary(shape):
                assert lengths[index[shape]] <= 4

    def test_edge_lines(self):
        edges = hasse_edges(build_hasse(4))
        assert ("0|4", "0,1|1,3") in edges
        assert ("0,1|2,2", "0,1,1|0,2,2") in edges
        assert len(edges) == 5


class TestGlb:
    def test_n4(self):
        g = build_hasse(4)
        assert glb(g, A, B) == D
        assert glb(g, S, C) == C
        assert glb(g, B, B) == B
        assert glb(g, C, D) is None

    def test_binaries_have_empty_meet(self):
        g = build_hasse(5)
        binaries = [v for v in g.vertices if is_binary(v)]
        for a, b in combinations(binaries, 2):
            assert glb(g, a, b) is None

    def test_meet_is_below_both(self):
        g = build_hasse(5)
        for a, b in combinations(g.vertices, 2):
            meet = glb(g, a, b)
            if meet is not None:
                assert refines(meet, a)
                assert refines(meet, b)

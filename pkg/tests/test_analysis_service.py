import math

import numpy as np
import pytest

from app.core.config import settings
from app.core.errors import CapExceeded, TreeShapeError
from app.models.chain import ChainKind, ChainSpec
from app.services.analysis_service import (
    cheeger_holds,
    exact_bottleneck,
    exact_diagnostics,
    exact_gap,
    exact_kernel,
    is_irreducible,
    kernel_rows,
    mixing_bounds,
    stationarity_residual,
    stationary_distribution,
)
from app.services.lattice_service import degree_one_binary, max_degree_tree
from app.services.shape_service import make_shape

KINDS = list(ChainKind)


def spec(kind, n, lazy=False):
    return ChainSpec(kind=kind, lazy=lazy, n_tips=n)


class TestKernels:
    @pytest.mark.parametrize("n", [4, 5])
    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("lazy", [False, True])
    def test_stochastic_and_stationary(self, n, kind, lazy):
        kernel = exact_kernel(n, spec(kind, n, lazy))
        P = kernel.matrix
        assert P.shape == (len(kernel.vertices),) * 2
        assert np.all(P >= 0)
        np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-12)
        assert stationarity_residual(kernel) < 1e-12
        assert is_irreducible(kernel)

    @pytest.mark.parametrize("n", [4, 5])
    def test_symmetric_kernel(self, n):
        P = exact_kernel(n, spec(ChainKind.SYMMETRIC, n)).matrix
        np.testing.assert_allclose(P, P.T, atol=1e-15)
        np.testing.assert_allclose(P.sum(axis=0), 1.0, atol=1e-12)

    @pytest.mark.parametrize("n", [4, 5])
    def test_random_walk_detailed_balance(self, n):
        kernel = exact_kernel(n, spec(ChainKind.RANDOM_WALK, n))
        flow = np.asarray(kernel.degrees, dtype=float)[:, None] * kernel.matrix
        np.testing.assert_allclose(flow, flow.T, atol=1e-12)
        assert np.all(np.diag(kernel.matrix) == 0)
        pi = stationary_distribution(kernel)
        np.testing.assert_allclose(pi, np.asarray(kernel.degrees) / sum(kernel.degrees))

    def test_lazy_is_half_identity(self):
        plain = exact_kernel(5, spec(ChainKind.METROPOLIS, 5)).matrix
        lazy = exact_kernel(5, spec(ChainKind.METROPOLIS, 5, lazy=True)).matrix
        np.testing.assert_allclose(lazy, 0.5 * (np.eye(len(plain)) + plain), atol=1e-15)

    def test_symmetric_self_loops(self):
        kernel = exact_kernel(5, spec(ChainKind.SYMMETRIC, 5))
        index = {shape: i for i, shape in enumerate(kernel.vertices)}
        top, m_n = max_degree_tree(5)
        assert kernel.matrix[index[top], index[top]] == pytest.approx(0.0)
        low = index[degree_one_binary(5)]
        assert kernel.matrix[low, low] == pytest.approx(1 - 1 / m_n)

    def test_rows_are_plain_lists(self):
        rows = kernel_rows(exact_kernel(4, spec(ChainKind.SYMMETRIC, 4)))
        assert len(rows) == 5
        assert rows[0] == pytest.approx([1 / 3, 1 / 3, 1 / 3, 0.0, 0.0])

    def test_cap(self):
        with pytest.raises(CapExceeded):
            exact_kernel(12, spec(ChainKind.SYMMETRIC, 12))
        with pytest.raises(TreeShapeError):
            exact_kernel(2, spec(ChainKind.RANDOM_WALK, 2))

    def test_explicit_cap_overrides_default(self, monkeypatch):
        monkeypatch.setattr(settings, "exhaustive_cap", 3)
        assert len(exact_kernel(5, spec(ChainKind.SYMMETRIC, 5), cap=5).vertices) == 15
        with pytest.raises(CapExceeded):
            exact_kernel(5, spec(ChainKind.SYMMETRIC, 5), cap=4)

    def test_irreducible_at_n8(self):
        kernel = exact_kernel(8, spec(ChainKind.RANDOM_WALK, 8))
        assert len(kernel.vertices) == 1108
        assert is_irreducible(kernel)

    def test_disconnected_kernel_is_reducible(self):
        kernel = exact_kernel(4, spec(ChainKind.SYMMETRIC, 4))
        assert not is_irreducible(kernel.model_copy(update={"matrix": np.eye(5)}))


class TestBottleneck:
    def test_symmetric_n4(self):
        report = exact_bottleneck(4, spec(ChainKind.SYMMETRIC, 4))
        assert report.phi_star == pytest.approx(1 / 3)
        assert [make_shape((0, 1, 1), (0, 2, 2))] in report.minimizers

    def test_symmetric_n5(self):
        report = exact_bottleneck(5, spec(ChainKind.SYMMETRIC, 5))
        assert report.phi_star <= 1 / 5 + 1e-12
        kernel = exact_kernel(5, spec(ChainKind.SYMMETRIC, 5))
        i = kernel.vertices.index(degree_one_binary(5))
        assert 1 - kernel.matrix[i, i] == pytest.approx(1 / 5)

    def test_random_walk_n4(self):
        report = exact_bottleneck(4, spec(ChainKind.RANDOM_WALK, 4))
        assert report.phi_star == pytest.approx(0.5)

    def test_random_walk_singleton_binary(self):
        # a degree-one tree sends all of its mass out in one step
        kernel = exact_kernel(5, spec(ChainKind.RANDOM_WALK, 5))
        index = {shape: i for i, shape in enumerate(kernel.vertices)}
        i = index[degree_one_binary(5)]
        assert 1 - kernel.matrix[i, i] == pytest.approx(1.0)

    def test_lazy_halves_the_bottleneck(self):
        plain = exact_bottleneck(4, spec(ChainKind.SYMMETRIC, 4))
        lazy = exact_bottleneck(4, spec(ChainKind.SYMMETRIC, 4, lazy=True))
        assert lazy.phi_star == pytest.approx(plain.phi_star / 2)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            exact_bottleneck(6, spec(ChainKind.SYMMETRIC, 6))


class TestGap:
    @pytest.mark.parametrize("n", [4, 5])
    @pytest.mark.parametrize("kind", KINDS)
    def test_cheeger_sandwich_on_lazy_kernels(self, n, kind):
        lazy = spec(kind, n, lazy=True)
        gap = exact_gap(n, lazy)
        bottleneck = exact_bottleneck(n, lazy)
        assert cheeger_holds(bottleneck, gap)
        assert min(gap.eigenvalues) >= -1e-12
        assert gap.gamma_star == gap.gamma

    def test_spectrum_is_sorted_and_starts_at_one(self):
        gap = exact_gap(5, spec(ChainKind.SYMMETRIC, 5))
        assert gap.eigenvalues[0] == pytest.approx(1.0)
        assert gap.eigenvalues == sorted(gap.eigenvalues, reverse=True)
        assert 0 < gap.gamma <= 2

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_plain_random_walk_is_periodic(self, n):
        gap = exact_gap(n, spec(ChainKind.RANDOM_WALK, n))
        assert gap.eigenvalues[-1] == pytest.approx(-1.0)
        assert gap.gamma_star == pytest.approx(0.0, abs=1e-9)
        assert gap.t_rel == math.inf

    def test_lazy_random_walk_relaxes(self):
        gap = exact_gap(5, spec(ChainKind.RANDOM_WALK, 5, lazy=True))
        assert gap.t_rel == pytest.approx(1 / gap.gamma)

    def test_prebuilt_kernel(self):
        lazy = spec(ChainKind.SYMMETRIC, 5, lazy=True)
        kernel = exact_kernel(5, lazy)
        assert exact_gap(5, lazy, kernel=kernel) == exact_gap(5, lazy)
        assert exact_bottleneck(5, lazy, kernel=kernel) == exact_bottleneck(5, lazy)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            exact_gap(5, spec(ChainKind.SYMMETRIC, 5), cap=4)


class TestBounds:
    def test_n5_symmetric_lower(self):
        report = mixing_bounds(5)
        assert report.m_n == 5
        assert report.g_n == 15
        assert report.symmetric_lower == pytest.approx(1.25)
        assert report.symmetric_upper == pytest.approx(8 * 25 * math.log(60))

    def test_n10_random_walk_lower(self):
        report = mixing_bounds(10)
        assert report.random_walk_lower == pytest.approx(7.0)
        assert report.random_walk_upper == pytest.approx(8 * math.log(4 * report.m_n * 37388))

    @pytest.mark.parametrize("n", range(4, 21))
    def test_lower_below_upper(self, n):
        report = mixing_bounds(n)
        assert report.symmetric_lower <= report.symmetric_upper
        assert report.random_walk_lower <= report.random_walk_upper
        assert report.exact == {}

    def test_small_n(self):
        with pytest.raises(TreeShapeError):
            mixing_bounds(3)

    def test_exact_section(self):
        report = mixing_bounds(4, exact=True)
        assert report.diameter == 3
        assert report.diameter_lower == pytest.approx(1.5)
        assert set(report.exact) == {"symmetric", "lazy-symmetric", "random-walk", "lazy-random-walk"}
        sym = report.exact["symmetric"]
        assert sym.bottleneck.phi_star == pytest.approx(1 / 3)
        assert sym.bottleneck_lower == pytest.approx(0.75)
        assert sym.relaxation_upper is None
        lazy_rw = report.exact["lazy-random-walk"]
        pi_min = 1 / 10
        assert lazy_rw.relaxation_upper == pytest.approx(math.log(4 / pi_min) * lazy_rw.gap.t_rel)

    def test_diagnostics_skip_bottleneck_above_cap(self):
        diagnostics = exact_diagnostics(6, spec(ChainKind.SYMMETRIC, 6, lazy=True))
        assert diagnostics.bottleneck is None
        assert diagnostics.stationarity_residual < 1e-12

    def test_diagnostics_reuse_kernel(self):
        sym = spec(ChainKind.SYMMETRIC, 4)
        assert exact_diagnostics(4, sym, kernel=exact_kernel(4, sym)) == exact_diagnostics(4, sym)

    def test_diagnostics_honour_cap(self):
        with pytest.raises(CapExceeded):
            exact_diagnostics(5, spec(ChainKind.SYMMETRIC, 5), cap=4)

    def test_exact_section_honours_cap(self, monkeypatch):
        with pytest.raises(CapExceeded):
            mixing_bounds(5, exact=True, cap=4)
        assert mixing_bounds(5, cap=4).diameter is None
        monkeypatch.setattr(settings, "exhaustive_cap", 3)
        assert mixing_bounds(5, exact=True, cap=5).diameter is not None

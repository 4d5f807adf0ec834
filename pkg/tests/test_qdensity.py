"""Kernel quantile-density estimation and the empirical density quantile."""

import numpy as np
import pytest
from scipy.stats import norm

from gldfit import (
    BandwidthSpec,
    GldParams,
    ProbabilityGrid,
    SortedSample,
    bandwidth,
    empirical_pdq,
    make_grid,
    pdq,
    qhat,
    sample,
)
from gldfit.errors import DataError

QOR = BandwidthSpec()

# Seed for the Monte-Carlo spot check against the model shape; the bound in
# that test is a single-draw check, so the draw is pinned.
SHAPE_TRACK_SEED = 15


def naive_qhat(values, u, b):
    """Direct transcription of the estimator, summed in index order."""

    def kb(t):
        s = t / b
        return 0.75 * (1.0 - s * s) / b if abs(s) <= 1.0 else 0.0

    n = len(values)
    total = 0.0
    for i in range(1, n + 1):
        total += values[i - 1] * (kb(u - (i - 1) / n) - kb(u - i / n))
    return total


def uniform_quantile_sample(n):
    """Exact uniform(-1, 1) quantiles; the noiseless ideal sample."""
    return SortedSample(2.0 * (np.arange(1, n + 1) / (n + 1)) - 1.0)


class TestSortedSample:
    def test_needs_ten_observations(self):
        with pytest.raises(ValueError):
            SortedSample.from_data(np.arange(9))

    def test_rejects_unsorted_without_from_data(self):
        with pytest.raises(ValueError):
            SortedSample(np.array([3.0, 1.0] * 5))

    def test_from_data_sorts(self):
        s = SortedSample.from_data([5, 1, 4, 2, 3, 9, 8, 7, 6, 0])
        assert np.array_equal(s.values, np.arange(10.0))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SortedSample.from_data([np.nan] + list(range(10)))

    def test_values_are_read_only(self):
        s = uniform_quantile_sample(10)
        with pytest.raises(ValueError):
            s.values[0] = 99.0


class TestProbabilityGrid:
    def test_points_are_midpoints(self):
        g = ProbabilityGrid(4)
        assert np.allclose(g.points, [0.125, 0.375, 0.625, 0.875])

    def test_interior_and_symmetric(self):
        g = ProbabilityGrid(50)
        pts = g.points
        assert pts[0] > 0.0 and pts[-1] < 1.0
        assert np.allclose(pts + pts[::-1], 1.0)
        assert np.allclose(np.diff(pts), pts[1] - pts[0])

    def test_too_small(self):
        with pytest.raises(ValueError):
            ProbabilityGrid(1)


class TestBandwidthSpec:
    def test_fixed_needs_value(self):
        with pytest.raises(ValueError):
            BandwidthSpec(mode="fixed")
        with pytest.raises(ValueError):
            BandwidthSpec(mode="qor-normal-reference", fixed_value=0.1)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            BandwidthSpec(mode="plugin")


class TestQhat:
    @pytest.mark.parametrize("u", [0.1, 0.3, 0.5, 0.9])
    @pytest.mark.parametrize("c", [3.0, -7.5])
    def test_constant_sample_gives_zero(self, u, c):
        s = SortedSample(np.full(50, c))
        b = min(u, 1.0 - u)
        # compact kernel with capped bandwidth: the kernel differences
        # telescope away, leaving only rounding residue
        tol = 1e-12 * abs(c)
        assert abs(qhat(s, u, b)) <= tol
        assert abs(qhat(s, u, 0.5 * b)) <= tol

    def test_uniform_sample_recovers_sparsity(self):
        s = uniform_quantile_sample(10**4)
        assert qhat(s, 0.5, 0.05) == pytest.approx(2.0, rel=0.05)

    def test_affine_scales_exactly(self):
        rng = np.random.default_rng(8)
        x = np.sort(rng.normal(size=200))
        s = SortedSample(x)
        t = SortedSample(np.sort(2.5 * x + 11.0))
        for u in (0.2, 0.5, 0.8):
            b = bandwidth(s, u, QOR)
            assert qhat(t, u, b) == pytest.approx(2.5 * qhat(s, u, b), rel=1e-12)

    @pytest.mark.parametrize("case", range(6))
    def test_matches_naive_oracle(self, case):
        rng = np.random.default_rng(100 + case)
        n = int(rng.integers(10, 400))
        x = np.sort(rng.normal(size=n) * rng.uniform(0.1, 10.0))
        u = float(rng.uniform(0.05, 0.95))
        b = float(rng.uniform(0.01, 0.3))
        got = qhat(SortedSample(x), u, b)
        want = naive_qhat(x, u, b)
        assert got == pytest.approx(want, abs=1e-12 * (1.0 + abs(want)))

    def test_rejects_bad_bandwidth(self):
        with pytest.raises(ValueError):
            qhat(uniform_quantile_sample(20), 0.5, 0.0)


class TestBandwidth:
    def test_normal_reference_at_median(self):
        s = uniform_quantile_sample(100)
        # direct evaluation of (15/n)^(1/5) * QOR^(2/5) at u = 0.5
        want = (15.0 / 100.0) ** 0.2 * (norm.pdf(0.0) ** 2) ** 0.4
        assert bandwidth(s, 0.5, QOR) == pytest.approx(want, abs=1e-12)
        assert bandwidth(s, 0.5, QOR) == pytest.approx(0.32805, abs=1e-4)

    def test_fixed_mode(self):
        s = uniform_quantile_sample(100)
        assert bandwidth(s, 0.5, BandwidthSpec.fixed(0.1)) == 0.1

    def test_cap_near_edge(self):
        s = uniform_quantile_sample(100)
        assert bandwidth(s, 0.99, QOR) == pytest.approx(0.01, abs=1e-15)

    def test_floor_at_reciprocal_n(self):
        s = uniform_quantile_sample(50)
        assert bandwidth(s, 0.5, BandwidthSpec.fixed(1e-6)) == pytest.approx(1.0 / 50.0)


class TestEmpiricalPdq:
    def test_uniform_sample_is_flat(self):
        s = uniform_quantile_sample(10**4)
        e = empirical_pdq(s, ProbabilityGrid(50), QOR)
        assert np.max(np.abs(e.values - 1.0)) <= 0.10

    def test_mean_one_identity(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            s = SortedSample.from_data(rng.gamma(2.0, size=300))
            e = empirical_pdq(s, make_grid(300), QOR)
            assert abs(e.values.mean() - 1.0) <= 1e-9

    def test_tracks_model_shape(self):
        p = GldParams(0.0, 1.0, 1.5, 1.5)
        s = SortedSample.from_data(sample(p, 10**4, seed=SHAPE_TRACK_SEED))
        grid = ProbabilityGrid(50)
        e = empirical_pdq(s, grid, QOR)
        assert np.max(np.abs(e.values - pdq(p, grid.points))) <= 0.1

    def test_mean_error_small_across_seeds(self):
        p = GldParams(0.0, 1.0, 1.5, 1.5)
        grid = ProbabilityGrid(50)
        truth = pdq(p, grid.points)
        for seed in range(5):
            s = SortedSample.from_data(sample(p, 10**4, seed=seed))
            e = empirical_pdq(s, grid, QOR)
            assert np.mean(np.abs(e.values - truth)) <= 0.05

    def test_location_invariance_bitwise(self):
        # data on a 2^-20 lattice so that the shift is exactly representable
        rng = np.random.default_rng(23)
        x = np.sort(rng.integers(-(2**20), 2**20, size=500) * 2.0**-20)
        grid = make_grid(500)
        a = empirical_pdq(SortedSample(x), grid, QOR)
        b = empirical_pdq(SortedSample(x + 3.0), grid, QOR)
        assert np.array_equal(a.values, b.values)
        assert a.kappa_hat == b.kappa_hat

    def test_scale_invariance_bitwise_for_power_of_two(self):
        rng = np.random.default_rng(29)
        x = np.sort(rng.normal(size=300))
        grid = make_grid(300)
        a = empirical_pdq(SortedSample(x), grid, QOR)
        b = empirical_pdq(SortedSample(4.0 * x), grid, QOR)
        assert np.array_equal(a.values, b.values)
        assert b.kappa_hat == pytest.approx(a.kappa_hat / 4.0, rel=1e-15)

    def test_affine_invariance_generic(self):
        rng = np.random.default_rng(31)
        x = np.sort(rng.normal(size=400))
        grid = make_grid(400)
        a = empirical_pdq(SortedSample(x), grid, QOR)
        b = empirical_pdq(SortedSample.from_data(0.37 * x - 12.9), grid, QOR)
        assert np.max(np.abs(a.values - b.values)) <= 1e-9

    def test_constant_sample_rejected(self):
        with pytest.raises(DataError):
            empirical_pdq(SortedSample(np.full(50, 2.0)), ProbabilityGrid(25), QOR)

    def test_heavy_ties_still_produce_values(self):
        x = np.sort(np.repeat([0.0, 1.0, 2.0, 3.0], 10))
        e = empirical_pdq(SortedSample(x), ProbabilityGrid(25), QOR)
        assert np.all(e.values > 0.0)
        assert abs(e.values.mean() - 1.0) <= 1e-9

    @pytest.mark.slow
    def test_statistical_consistency(self):
        p = GldParams(0.0, 1.0, 0.5, 0.6)
        grid = ProbabilityGrid(50)
        truth = pdq(p, grid.points)
        better = 0
        for trial in range(50):
            e_small = empirical_pdq(
                SortedSample.from_data(sample(p, 10**3, seed=6000 + trial)), grid, QOR
            )
            e_big = empirical_pdq(
                SortedSample.from_data(sample(p, 10**4, seed=7000 + trial)), grid, QOR
            )
            err_small = np.mean(np.abs(e_small.values - truth))
            err_big = np.mean(np.abs(e_big.values - truth))
            better += err_big < err_small
        assert better >= 45


class TestMakeGrid:
    @pytest.mark.parametrize("n,j", [(100, 25), (250, 50), (200, 25), (10, 25), (10**5, 50)])
    def test_size_rule(self, n, j):
        assert make_grid(n).j_count == j

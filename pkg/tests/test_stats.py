"""Tests for the two-sample KS test, mean/SD and kernel density estimation."""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.stats import kstwobign

from src.core.constants import KDE_GRID_POINTS
from src.core.validators import ArgumentError, DegenerateDistributionError
from src.services.diversity import SampleSeries, msttr
from src.services.stats import kde, kolmogorov_sf, ks_two_sample, mean_sd, silverman_bandwidth


class TestKolmogorovSeries:
    @pytest.mark.parametrize("lam", [0.3, 0.8, 1.0, 1.36, 2.5])
    def test_matches_limiting_distribution(self, lam):
        assert kolmogorov_sf(lam) == pytest.approx(kstwobign.sf(lam), rel=1e-9, abs=1e-12)

    def test_non_positive_lambda(self):
        assert kolmogorov_sf(0.0) == 1.0


class TestKsTwoSample:
    def test_identical_samples(self):
        result = ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert result.d == 0.0
        assert result.p == 1.0

    def test_shifted_samples(self):
        result = ks_two_sample([1, 2, 3, 4], [3, 4, 5, 6])
        assert result.d == pytest.approx(0.5)
        assert result.p == pytest.approx(kolmogorov_sf(math.sqrt(16 / 8) * 0.5))
        assert (result.n1, result.n2) == (4, 4)

    def test_ties_across_samples(self):
        assert ks_two_sample([1, 1, 2], [1, 2, 2]).d == pytest.approx(1 / 3)

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_pointwise_ecdf_gap(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(0, 8, size=int(rng.integers(5, 40)))
        b = rng.integers(1, 10, size=int(rng.integers(5, 40)))
        gap = max(abs(np.mean(a <= t) - np.mean(b <= t)) for t in np.concatenate([a, b]))
        result = ks_two_sample(a.tolist(), b.tolist())
        assert result.d == pytest.approx(gap, abs=1e-12)
        assert (result.n1, result.n2) == (a.size, b.size)

    def test_disjoint_samples(self):
        result = ks_two_sample([1, 2, 3], [4, 5, 6])
        assert result.d == 1.0
        assert 0 <= result.p < 0.2

    def test_accepts_series(self):
        a = SampleSeries("ttr", 10, (0.5, 0.6))
        b = SampleSeries("ttr", 10, (0.5, 0.6))
        assert ks_two_sample(a, b).d == 0.0

    def test_empty_sample_rejected(self):
        with pytest.raises(ArgumentError):
            ks_two_sample([], [1.0])

    def test_diversity_difference_is_significant(self, narrow_stream, broad_stream):
        _, narrow = msttr(narrow_stream, 100)
        _, broad = msttr(broad_stream, 100)
        result = ks_two_sample(narrow, broad)
        assert result.d > 0.5
        assert result.p < 0.001


class TestMeanSd:
    def test_population_sd(self):
        summary = mean_sd([1, 2, 3, 4])
        assert summary.mean == 2.5
        assert summary.sd == pytest.approx(math.sqrt(1.25))

    def test_single_value(self):
        assert mean_sd([7.0]).sd == 0.0


class TestKde:
    def test_silverman(self):
        values = np.arange(1.0, 11.0)
        expected = 0.9 * min(np.std(values, ddof=1), 4.5 / 1.34) * 10 ** (-0.2)
        assert silverman_bandwidth(values) == pytest.approx(expected)

    def test_zero_iqr_falls_back_to_sd(self):
        values = [1.0, 1.0, 1.0, 1.0, 5.0]
        expected = 0.9 * np.std(values, ddof=1) * 5 ** (-0.2)
        assert silverman_bandwidth(values) == pytest.approx(expected)

    def test_grid_and_mass(self):
        curve = kde([0.1, 0.4, 0.45, 0.5, 0.9])
        assert len(curve.x) == len(curve.density) == KDE_GRID_POINTS
        assert curve.x[0] == pytest.approx(0.1 - 3 * curve.bandwidth)
        assert curve.x[-1] == pytest.approx(0.9 + 3 * curve.bandwidth)
        assert trapezoid(curve.density, curve.x) == pytest.approx(1.0, abs=0.01)
        assert min(curve.density) >= 0

    def test_explicit_bandwidth(self):
        assert kde([0.0, 1.0], bandwidth=0.25).bandwidth == 0.25

    def test_identical_values_degenerate(self):
        with pytest.raises(DegenerateDistributionError):
            kde([0.5, 0.5, 0.5])

    def test_single_value_rejected(self):
        with pytest.raises(ArgumentError):
            kde([0.5])

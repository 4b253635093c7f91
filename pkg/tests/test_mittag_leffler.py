"""
Tests for the Mittag-Leffler targets and the KS helpers.
"""

import math

import numpy as np
import pytest
from scipy.special import erfcx

from src.limits import (
    MLTarget,
    ks_critical_value,
    ks_distance,
    ks_pvalue,
    ml_cdf,
    ml_cdf_half,
    ml_laplace,
    ml_moment,
    ml_moment_ratio,
    stehfest_invert,
    stehfest_weights,
)
from src.models import make_stream
from src.utils import ConfigError


class TestMoments:
    def test_half(self):
        assert ml_moment(0.5, 2) == pytest.approx(2.0)
        assert ml_moment_ratio(0.5) == pytest.approx(math.pi / 2.0)

    def test_endpoints(self):
        # exponential at 0, point mass at 1
        assert ml_moment(0.0, 3) == pytest.approx(6.0)
        assert ml_moment_ratio(0.0) == pytest.approx(2.0)
        assert ml_moment(1.0, 3) == pytest.approx(1.0)
        assert ml_moment_ratio(1.0) == pytest.approx(1.0)

    def test_zeroth_moment(self):
        assert ml_moment(0.3, 0) == 1.0

    @pytest.mark.parametrize("rho,m", [(-0.1, 1), (1.1, 1), (0.5, -1), (0.5, 1.5)])
    def test_rejects_bad_arguments(self, rho, m):
        with pytest.raises(ConfigError):
            ml_moment(rho, m)


class TestLaplace:
    @pytest.mark.parametrize("s", [0.1, 1.0, 3.0, 10.0])
    def test_half_is_scaled_erfc(self, s):
        assert ml_laplace(0.5, s) == pytest.approx(erfcx(s), rel=1e-8)

    def test_endpoints(self):
        assert ml_laplace(0.0, 2.0) == pytest.approx(1.0 / 3.0)
        assert ml_laplace(1.0, 2.0) == pytest.approx(math.exp(-2.0))
        assert ml_laplace(0.7, 0.0) == 1.0

    def test_completely_monotone(self):
        values = [ml_laplace(0.3, s) for s in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b > 0 for a, b in zip(values, values[1:]))

    def test_negative_argument(self):
        with pytest.raises(ConfigError):
            ml_laplace(0.5, -1.0)


class TestInversion:
    def test_weights_sum_to_zero(self):
        weights = stehfest_weights()
        assert weights.size == 14
        assert abs(weights.sum()) < 1e-6 * np.abs(weights).max()

    def test_odd_stages_rejected(self):
        with pytest.raises(ConfigError):
            stehfest_weights(7)

    def test_exponential(self):
        assert stehfest_invert(lambda s: 1.0 / (s + 1.0), 1.0) == pytest.approx(
            math.exp(-1.0), abs=1e-4
        )

    def test_cdf_matches_half_normal(self):
        xs = np.array([0.25, 0.5, 1.0, 2.0, 3.0])
        result = ml_cdf(0.5, xs)
        assert result.validated
        np.testing.assert_allclose(result.values, ml_cdf_half(xs), atol=2e-3)

    def test_cdf_shape(self):
        values = ml_cdf(0.3, [0.0, 0.5, 1.0, 2.0, 5.0]).values
        assert values[0] == 0.0
        assert np.all(np.diff(values) >= -1e-6)
        assert values[-1] > 0.9

    def test_outside_validated_band(self):
        assert not ml_cdf(0.05, [1.0]).validated


class TestTarget:
    def test_closed_form_cdfs(self):
        assert MLTarget(0.0).cdf([1.0])[0] == pytest.approx(1.0 - math.exp(-1.0))
        np.testing.assert_array_equal(MLTarget(1.0).cdf([0.5, 1.0, 2.0]), [0.0, 1.0, 1.0])
        assert MLTarget(0.5).cdf(2.0)[0] == pytest.approx(math.erf(1.0))

    def test_mean_and_scaling(self):
        target = MLTarget(0.5)
        assert target.mean == pytest.approx(1.0 / math.gamma(1.5))
        assert target.scaled(4.0) == pytest.approx(2.0 * target.mean)

    def test_invalid_rho(self):
        with pytest.raises(ConfigError):
            MLTarget(1.5)


class TestKolmogorovSmirnov:
    def test_distance_at_sample_points(self):
        assert ks_distance([1.0, 2.0, 3.0], lambda x: x / 4.0) == pytest.approx(0.25)

    def test_ties_are_counted(self):
        assert ks_distance([1.0, 1.0], lambda x: np.full_like(x, 0.5)) == pytest.approx(0.5)

    def test_empty(self):
        with pytest.raises(ConfigError):
            ks_distance([], ml_cdf_half)

    def test_half_normal_samples_fit(self):
        draws = math.sqrt(2.0) * np.abs(make_stream(17, 0).standard_normal(5000))
        distance = ks_distance(draws, ml_cdf_half)
        assert distance < ks_critical_value(5000, 0.001)
        assert ks_pvalue(distance, 5000) > 0.001

    def test_pvalue_and_critical_value_agree(self):
        critical = ks_critical_value(100, 0.01)
        assert ks_pvalue(critical, 100) == pytest.approx(0.01, rel=1e-6)
        assert ks_pvalue(0.0, 100) == pytest.approx(1.0)

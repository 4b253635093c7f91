"""
Tests for step and waiting-time laws and random streams.
"""

import math

import numpy as np
import pytest

from src.models import (
    ContinuousStepLaw,
    DriftClass,
    make_bernoulli_walk,
    make_deterministic,
    make_gaussian,
    make_lattice,
    make_left_continuous,
    make_pareto_wait,
    make_stream,
    replicate_streams,
    require_lattice,
    sample_step,
    sample_waiting,
)
from src.utils import ConfigError, PreconditionError


class TestBernoulli:
    def test_symmetric_pmf(self):
        law = make_bernoulli_walk(0.5)
        assert law.prob(-1) == 0.5
        assert law.prob(1) == 0.5
        assert law.prob(0) == 0.0
        assert law.truncation_mass == 0.0
        assert law.drift_class is DriftClass.OSCILLATES
        assert law.rho == 0.5

    def test_drift_classes(self):
        down = make_bernoulli_walk(1.0 / 3.0)
        assert down.prob(-1) == pytest.approx(2.0 / 3.0)
        assert down.mean == pytest.approx(-1.0 / 3.0)
        assert down.drift_class is DriftClass.DRIFTS_DOWN
        assert down.rho == 0.0

        up = make_bernoulli_walk(2.0 / 3.0)
        assert up.mean == pytest.approx(1.0 / 3.0)
        assert up.drift_class is DriftClass.DRIFTS_UP
        assert up.rho == 1.0

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_degenerate(self, p):
        with pytest.raises(ConfigError):
            make_bernoulli_walk(p)


class TestLattice:
    def test_rejects_bad_pmf(self):
        with pytest.raises(ConfigError):
            make_lattice({-1: 0.5, 1: 0.6})
        with pytest.raises(ConfigError):
            make_lattice({3: 1.0})

    def test_deterministic_is_allowed_explicitly(self):
        law = make_deterministic(1)
        assert law.drift_class is DriftClass.DRIFTS_UP
        assert law.prob(1) == 1.0

    def test_right_continuity(self):
        assert make_bernoulli_walk(0.3).is_right_continuous
        assert not make_lattice({-1: 0.4, 0: 0.2, 2: 0.4}).is_right_continuous
        assert make_deterministic(-1).upward_skip_free
        assert not make_deterministic(-1).is_right_continuous
        assert not make_lattice({-1: 0.4, 0: 0.2, 2: 0.4}).upward_skip_free

    def test_require_lattice(self):
        with pytest.raises(PreconditionError):
            require_lattice(make_gaussian(), "exact series")


class TestLeftContinuous:
    def test_first_coefficients(self):
        law = make_left_continuous(0.5, 0.5, max_support=64)
        # truncation at 64 renormalizes by a factor within 1e-3 of 1
        assert law.prob(-1) == pytest.approx(1.0 / 3.0, rel=1e-3)
        assert law.prob(0) == pytest.approx(0.5, rel=1e-3)
        assert law.prob(1) == pytest.approx(0.125, rel=1e-3)
        assert law.support_lo == -1
        assert law.support_hi == 64

    def test_truncation_mass_is_reported(self):
        law = make_left_continuous(0.5, 0.5, max_support=64)
        assert 0.0 < law.truncation_mass < 1e-3
        assert law.pmf.sum() == pytest.approx(1.0, abs=1e-12)

    def test_oscillates_with_rho_hint(self):
        law = make_left_continuous(0.5, 0.5, max_support=64)
        assert law.drift_class is DriftClass.OSCILLATES
        assert law.rho == pytest.approx(2.0 / 3.0)

    def test_eps_stops_before_cap(self):
        # beta close to 1 has a light tail; the residual criterion binds first
        law = make_left_continuous(0.9, 0.5, max_support=None)
        assert law.truncation_mass < 1e-12

    @pytest.mark.parametrize("beta,gamma", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0)])
    def test_rejects_bad_parameters(self, beta, gamma):
        with pytest.raises(ConfigError):
            make_left_continuous(beta, gamma)


class TestSampling:
    def test_bernoulli_support(self):
        draws = sample_step(make_bernoulli_walk(0.5), make_stream(1, 0), size=1000)
        assert set(np.unique(draws)) <= {-1, 1}

    def test_single_draw_is_scalar(self):
        value = sample_step(make_bernoulli_walk(0.5), make_stream(1, 0))
        assert value in (-1, 1)

    def test_gaussian_mean(self):
        draws = sample_step(make_gaussian(), make_stream(11, 0), size=1_000_000)
        assert abs(draws.mean()) < 4e-3

    def test_left_continuous_never_below_minus_one(self):
        law = make_left_continuous(0.5, 0.5, max_support=1024)
        draws = sample_step(law, make_stream(3, 0), size=100_000)
        assert draws.min() >= -1

    def test_empirical_frequencies(self):
        law = make_lattice({-1: 0.4, 0: 0.2, 2: 0.4})
        draws = sample_step(law, make_stream(5, 0), size=200_000)
        assert np.mean(draws == 0) == pytest.approx(0.2, abs=0.01)
        assert np.mean(draws == 2) == pytest.approx(0.4, abs=0.01)


class TestWaiting:
    def test_pareto_boundary(self):
        wait = make_pareto_wait(0.6)
        assert wait.inverse_survival(np.array([1.0]))[0] == 1.0
        assert wait.survival(0.5) == 1.0
        assert wait.survival(8.0) == pytest.approx(8.0**-0.6)

    def test_pareto_samples_above_scale(self):
        wait = make_pareto_wait(0.6, scale=2.0)
        draws = sample_waiting(wait, make_stream(2, 0), size=10_000)
        assert draws.min() >= 2.0
        assert isinstance(sample_waiting(wait, make_stream(2, 1)), float)

    def test_slowly_varying_constant(self):
        wait = make_pareto_wait(0.5, scale=4.0)
        assert wait.slowly_varying_constant == pytest.approx(math.sqrt(math.pi) * 2.0)

    def test_rejects_alpha_outside_unit_interval(self):
        with pytest.raises(ConfigError):
            make_pareto_wait(1.0)


class TestStreams:
    def test_same_key_same_draws(self):
        a = make_stream(42, 3).random(5)
        b = make_stream(42, 3).random(5)
        assert np.array_equal(a, b)

    def test_distinct_keys_differ(self):
        a = make_stream(42, 3).random(5)
        b = make_stream(42, 4).random(5)
        c = make_stream(43, 3).random(5)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_replicate_substreams_are_independent(self):
        step, wait = replicate_streams(7, 0)
        assert not np.array_equal(step.random(5), wait.random(5))

    def test_negative_seed_rejected(self):
        with pytest.raises(ConfigError):
            make_stream(-1, 0)


def test_continuous_laws_are_symmetric():
    law = make_gaussian(2.0)
    assert isinstance(law, ContinuousStepLaw)
    assert law.drift_class is DriftClass.OSCILLATES
    assert law.rho == 0.5
    assert law.describe() == {"kind": "gaussian", "sigma": 2.0}

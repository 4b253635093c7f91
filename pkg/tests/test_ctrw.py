"""
Tests for continuous-time walks.
"""

import numpy as np
import pytest

from src.ctrw import CTRWConfig, renewal_count, scaling_check, simulate_ctrw, simulate_replicate
from src.models import (
    make_bernoulli_walk,
    make_deterministic_wait,
    make_exponential_wait,
    make_gaussian,
    make_pareto_wait,
)
from src.utils import ConfigError
from src.walk import monte_carlo


def _config(**overrides):
    values = dict(
        step_law=make_bernoulli_walk(0.5),
        waiting_law=make_deterministic_wait(),
        horizons=[0.0, 2.5, 10.0],
        reps=20,
        seed=4,
    )
    values.update(overrides)
    return CTRWConfig(**values)


def test_renewal_count():
    waits = np.array([1.0, 0.5, 2.0])
    assert renewal_count(waits, [0.0, 1.0, 1.4, 1.5, 3.5, 10.0]).tolist() == [0, 1, 1, 2, 3, 3]


class TestDeterministicWaits:
    def test_jumps_are_floor(self):
        result = simulate_ctrw(_config())
        assert np.all(result.jumps == np.array([0, 2, 10]))
        assert np.all(result.at(0.0) == 1)

    def test_matches_discrete_walk(self):
        result = simulate_ctrw(_config())
        discrete = monte_carlo(make_bernoulli_walk(0.5), 10, 20, seed=4)
        assert np.array_equal(result.at(10.0), discrete.column("r_weak"))

    def test_composition_and_monotonicity(self):
        result = simulate_ctrw(_config())
        assert result.composition_holds
        assert result.nondecreasing


class TestHeavyTails:
    def test_pareto_composition(self):
        config = _config(
            step_law=make_gaussian(),
            waiting_law=make_pareto_wait(0.6),
            horizons=[10.0, 100.0, 1000.0],
            reps=50,
        )
        result = simulate_ctrw(config)
        assert result.composition_holds
        assert result.nondecreasing
        assert np.all(result.jumps[:, -1] >= result.jumps[:, 0])

    def test_replicate_is_reproducible(self):
        config = _config(waiting_law=make_exponential_wait(), horizons=[5.0, 50.0])
        a = simulate_replicate(config, 3)
        b = simulate_replicate(config, 3)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_frame_layout(self):
        result = simulate_ctrw(_config(reps=3))
        frame = result.to_frame()
        assert list(frame.columns) == ["replicate", "t", "r_tilde"]
        assert len(frame) == 9
        assert frame["t"].tolist()[:3] == [0.0, 2.5, 10.0]

    def test_unknown_horizon(self):
        result = simulate_ctrw(_config(reps=2))
        with pytest.raises(ConfigError):
            result.at(3.0)


class TestValidation:
    @pytest.mark.parametrize(
        "overrides",
        [
            {"horizons": []},
            {"horizons": [10.0, 5.0]},
            {"horizons": [-1.0, 5.0]},
            {"horizons": [1.0, float("inf")]},
            {"reps": 0},
            {"seed": -1},
        ],
    )
    def test_rejects(self, overrides):
        with pytest.raises(ConfigError):
            _config(**overrides)


class TestScalingCheck:
    def test_targets(self):
        report = scaling_check([1.0, 2.0, 3.0], [4.0, 5.0, 6.0], 0.5, 10.0, 1000.0)
        assert report["mean_ratio"] == pytest.approx(2.5)
        assert report["mean_ratio_target"] == pytest.approx(10.0)
        assert report["moment_ratio_target"] == pytest.approx(np.pi / 2.0)
        assert report["moment_ratio_t1"] == pytest.approx((14.0 / 3.0) / 4.0)

    def test_needs_a_decade(self):
        with pytest.raises(ConfigError):
            scaling_check([1.0], [2.0], 0.5, 10.0, 50.0)

    def test_rejects_bad_exponent(self):
        with pytest.raises(ConfigError):
            scaling_check([1.0], [2.0], 1.5, 1.0, 100.0)

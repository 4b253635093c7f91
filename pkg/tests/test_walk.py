"""
Tests for the record trackers and the Monte Carlo driver.
"""

import numpy as np
import pytest

from src.exact import build_series, m_infinity_law
from src.models import make_bernoulli_walk, make_gaussian, make_lattice, make_stream
from src.utils import ConfigError, PreconditionError
from src.walk import (
    RecordTracker,
    certified_cap,
    empirical_r_infinity,
    monte_carlo,
    record_count_path,
    record_tail_bound,
    run_tracker,
    run_walk,
    walk_stats_from_steps,
)
from src.walk.montecarlo import replicate_values


class TestSinglePath:
    def test_counters(self):
        stats = walk_stats_from_steps([1, -1, 1, 1], sigmas=[0, 1.5], threshold=(0, 1))
        assert stats.n == 4
        assert stats.r_weak == 4
        assert stats.r_strong == 3
        assert stats.max_val == 2
        assert stats.n_nonneg == 4
        assert stats.n_pos == 3
        assert stats.last_max_pos == 4
        assert stats.first_max_pos == 4
        assert stats.final_value == 2
        assert stats.r_sigma == {0.0: 4, 1.5: 2}
        assert stats.r_thresholded == 3

    def test_ladder_data(self):
        stats = walk_stats_from_steps([1, -1, 1, 1])
        assert stats.ladder_epochs == [1, 2, 1]
        assert stats.ladder_heights == [1, 0, 1]
        assert sum(stats.ladder_epochs) == stats.last_max_pos
        assert len(stats.ladder_epochs) == stats.r_weak - 1

    def test_threshold_below_start_counts_origin(self):
        stats = walk_stats_from_steps([1, -1, 1, 1], threshold=(1, 0))
        assert stats.r_thresholded == stats.r_weak

    def test_empty_path(self):
        stats = walk_stats_from_steps([])
        assert stats.r_weak == 1
        assert stats.r_strong == 1
        assert stats.last_max_pos == 0

    def test_continuous_steps(self):
        stats = walk_stats_from_steps([0.5, -0.2, 0.1])
        assert stats.r_weak == 2
        assert stats.max_val == pytest.approx(0.5)
        assert isinstance(stats.max_val, float)

    def test_strong_max_position_on_ties(self):
        # the maximum 1 is first reached at step 1 and revisited at step 3
        stats = walk_stats_from_steps([1, -1, 1, -1])
        assert stats.first_max_pos == 1
        assert stats.last_max_pos == 3

    def test_record_count_path(self):
        assert record_count_path(np.array([1, -1, 1, 1])).tolist() == [1, 2, 2, 3, 4]

    def test_negative_sigma_rejected(self):
        with pytest.raises(ConfigError):
            walk_stats_from_steps([1], sigmas=[-0.5])


class TestTracker:
    def test_blocks_match_one_shot(self):
        steps = make_bernoulli_walk(0.5).sample(make_stream(9, 0), 500)
        whole = walk_stats_from_steps(steps, sigmas=[2.0], threshold=(0, 3))

        tracker = RecordTracker(1, sigmas=[2.0], threshold=(0, 3), collect_ladder=True)
        for chunk in np.array_split(steps, [1, 7, 8, 200, 333]):
            tracker.update(chunk)
        assert tracker.stats().to_dict() == whole.to_dict()

    def test_record_count_path_agrees(self):
        steps = make_bernoulli_walk(0.4).sample(make_stream(2, 0), 300)
        counts = record_count_path(steps)
        assert counts[-1] == walk_stats_from_steps(steps).r_weak
        assert np.all(np.diff(counts) >= 0)

    def test_block_size_does_not_change_results(self):
        law = make_bernoulli_walk(0.5)
        a = run_tracker(law, 1000, [make_stream(4, r) for r in range(3)], block_size=7)
        b = run_tracker(law, 1000, [make_stream(4, r) for r in range(3)], block_size=1000)
        for key, column in a.columns().items():
            assert np.array_equal(column, b.columns()[key])

    @pytest.mark.parametrize(
        "law",
        [
            make_bernoulli_walk(0.5),
            make_bernoulli_walk(0.3),
            make_lattice({-3: 0.2, -1: 0.3, 0: 0.1, 1: 0.4}),
        ],
    )
    def test_right_continuous_maximum_counts_strong_records(self, law):
        assert law.is_right_continuous
        for replicate in range(20):
            steps = law.sample(make_stream(13, replicate), 400)
            stats = walk_stats_from_steps(steps)
            assert stats.max_val == stats.r_strong - 1

    def test_row_mismatch(self):
        tracker = RecordTracker(2)
        with pytest.raises(ConfigError):
            tracker.update(np.ones((3, 4), dtype=np.int64))

    def test_run_walk_is_reproducible(self):
        law = make_gaussian()
        assert run_walk(law, 200, seed=5).to_dict() == run_walk(law, 200, seed=5).to_dict()


class TestMonteCarlo:
    def test_replicates_are_reproducible(self):
        law = make_bernoulli_walk(0.5)
        a = monte_carlo(law, 100, 50, seed=3)
        b = monte_carlo(law, 100, 50, seed=3)
        assert a.to_frame().equals(b.to_frame())

    @pytest.mark.slow
    def test_worker_count_does_not_change_results(self):
        law = make_bernoulli_walk(0.5)
        a = monte_carlo(law, 50, 600, seed=8, workers=1)
        b = monte_carlo(law, 50, 600, seed=8, workers=2)
        assert a.to_frame().equals(b.to_frame())

    def test_sigma_zero_is_weak_count(self):
        summary = monte_carlo(make_bernoulli_walk(0.5), 200, 40, seed=1, sigmas=[0.0, 1.5])
        assert np.array_equal(summary.column("r_sigma[0]"), summary.column("r_weak"))
        assert np.all(summary.column("r_sigma[1.5]") <= summary.column("r_weak"))

    def test_checkpoints(self):
        summary = monte_carlo(make_bernoulli_walk(0.5), 50, 20, seed=1, checkpoints=[0, 5, 50])
        counts = summary.checkpoint_counts
        assert counts.shape == (20, 3)
        assert np.all(counts[:, 0] == 1)
        assert np.array_equal(counts[:, 2], summary.column("r_weak"))
        assert np.all(np.diff(counts, axis=1) >= 0)

    def test_collect_and_frame(self):
        summary = monte_carlo(
            make_bernoulli_walk(0.5), 10, 5, seed=2, collect=["r_weak", "max_val"]
        )
        frame = replicate_values(summary, ["r_weak"])
        assert list(frame.columns) == ["replicate", "r_weak"]
        assert frame["replicate"].tolist() == list(range(5))
        with pytest.raises(ConfigError):
            summary.column("n_pos")

    def test_unknown_statistic(self):
        with pytest.raises(ConfigError):
            monte_carlo(make_bernoulli_walk(0.5), 10, 5, seed=2, collect=["bogus"])

    def test_merge_orders_by_index(self):
        law = make_bernoulli_walk(0.5)
        whole = monte_carlo(law, 30, 10, seed=6)
        first = monte_carlo(law, 30, 10, seed=6)
        mask = whole.index < 4
        head = type(whole)(
            whole.law, 30, 6, whole.index[mask], {k: v[mask] for k, v in whole.values.items()}
        )
        tail = type(whole)(
            whole.law, 30, 6, whole.index[~mask], {k: v[~mask] for k, v in whole.values.items()}
        )
        assert tail.merge(head).to_frame().equals(first.to_frame())
        with pytest.raises(ConfigError):
            head.merge(head)

    def test_json_summary(self):
        summary = monte_carlo(make_bernoulli_walk(0.5), 20, 30, seed=2)
        data = summary.to_json_dict()
        assert data["reps"] == 30
        hist = data["statistics"]["r_weak"]["histogram"]
        assert sum(hist.values()) == 30

    def test_rejects_bad_counts(self):
        with pytest.raises(ConfigError):
            monte_carlo(make_bernoulli_walk(0.5), 10, 0, seed=1)
        with pytest.raises(ConfigError):
            monte_carlo(make_bernoulli_walk(0.5), -1, 1, seed=1)


class TestRInfinity:
    def test_requires_drift_down(self):
        with pytest.raises(PreconditionError):
            empirical_r_infinity(make_bernoulli_walk(0.5), 10, seed=1)
        with pytest.raises(PreconditionError):
            empirical_r_infinity(make_gaussian(), 10, seed=1)

    def test_certified_cap(self, down_walk):
        cap = certified_cap(down_walk)
        assert record_tail_bound(down_walk, cap) < 1e-4
        assert record_tail_bound(down_walk, cap - 1) >= 1e-4 or cap == 1

    @pytest.mark.slow
    def test_geometric_mean(self, down_walk):
        estimate = empirical_r_infinity(down_walk, 20_000, seed=11)
        assert estimate.certified
        assert estimate.mean() == pytest.approx(3.0, rel=0.05)
        pmf = estimate.pmf()
        assert pmf[1] == pytest.approx(1.0 / 3.0, abs=0.02)

    def test_uncertified_cap_warns_but_runs(self, down_walk):
        estimate = empirical_r_infinity(down_walk, 100, seed=1, cap=5)
        assert not estimate.certified
        assert estimate.summary.n == 5

    @pytest.mark.slow
    def test_maximum_never_above_start(self, down_walk):
        reps = 4000
        summary = monte_carlo(down_walk, 1000, reps, seed=17, collect=["max_val"])
        empirical = float(np.mean(summary.column("max_val") == 0))
        exact = m_infinity_law(build_series(down_walk, 1000), down_walk).parameter.value
        se = np.sqrt(exact * (1.0 - exact) / reps)
        assert abs(empirical - exact) < 3.0 * se

"""
Tests for the record-lab command line.
"""

import json
import math

import pandas as pd
import pytest
from click.testing import CliRunner

from cli import cli
from src.utils import configure_root


@pytest.fixture
def runner():
    yield CliRunner()
    # handlers bound to the runner's captured stderr must not outlive it
    configure_root(level="WARNING")


def _invoke(runner, args):
    return runner.invoke(cli, args, catch_exceptions=False)


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class TestExactCommands:
    def test_dist_json(self, runner, tmp_path):
        out = tmp_path / "dist.json"
        result = _invoke(
            runner,
            ["dist", "--law", "bernoulli:0.5", "--n", "2", "--format", "json", "--out", str(out)],
        )
        assert result.exit_code == 0
        data = _read_json(out)
        assert data["pmf"] == pytest.approx({"1": 0.25, "2": 0.5, "3": 0.25})
        assert data["mean"] == pytest.approx(2.0)

    def test_dist_csv_strong(self, runner, tmp_path):
        out = tmp_path / "dist.csv"
        result = _invoke(
            runner, ["dist", "--law", "bernoulli:0.5", "--n", "3", "--strong", "--out", str(out)]
        )
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["m", "prob", "log_prob"]
        assert frame["prob"].sum() == pytest.approx(1.0)

    def test_exact_table_with_metadata(self, runner, tmp_path):
        out = tmp_path / "q.csv"
        result = _invoke(
            runner, ["exact", "--law", "bernoulli:0.5", "--horizon", "10", "--out", str(out)]
        )
        assert result.exit_code == 0
        with open(out, encoding="utf-8") as fh:
            first = fh.readline()
        assert first.startswith("# ")
        meta = json.loads(first[2:])
        assert meta["horizon"] == 10
        assert meta["drift_class"] == "oscillates"
        assert "c_rho" in meta

        frame = pd.read_csv(out, comment="#")
        assert list(frame.columns) == ["n", "q", "q_strict", "a", "a_strict", "t", "d", "t_strict"]
        assert frame.loc[1, "a"] == pytest.approx(0.5)
        assert frame.loc[2, "q"] == pytest.approx(0.75)

    def test_exact_help_points_to_other_tables(self, runner):
        result = _invoke(runner, ["exact", "--help"])
        assert result.exit_code == 0
        assert "`dist`" in result.output
        assert "`sigma`" in result.output

    def test_exact_drift_down_metadata(self, runner, tmp_path):
        out = tmp_path / "down.json"
        result = _invoke(
            runner,
            [
                "exact", "--law", "bernoulli:0.25", "--horizon", "400",
                "--format", "json", "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        data = _read_json(out)
        assert data["r_infinity"]["start"] == 1
        assert data["m_infinity"]["start"] == 0
        assert len(data["rows"]) == 401

    def test_config_file_with_flag_override(self, runner, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({"law": "bernoulli:0.5", "n": 2, "format": "json"}))
        out = tmp_path / "dist.json"
        result = _invoke(
            runner, ["dist", "--config", str(config), "--n", "3", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert set(_read_json(out)["pmf"]) == {"1", "2", "3", "4"}


class TestSimulationCommands:
    def test_simulate_csv(self, runner, tmp_path):
        out = tmp_path / "sim.csv"
        result = _invoke(
            runner,
            [
                "simulate", "--law", "bernoulli:0.5", "--n", "20", "--reps", "5",
                "--seed", "1", "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert frame["replicate"].tolist() == [0, 1, 2, 3, 4]
        assert (frame["r_weak"] >= frame["r_strong"]).all()

    def test_simulate_json_normalized(self, runner, tmp_path):
        out = tmp_path / "sim.json"
        result = _invoke(
            runner,
            [
                "simulate", "--law", "gaussian", "--n", "100", "--reps", "20",
                "--seed", "1", "--format", "json", "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        data = _read_json(out)
        assert data["reps"] == 20
        assert data["normalized"]["moment_ratio_target"] == pytest.approx(math.pi / 2.0)

    def test_sigma_table(self, runner, tmp_path):
        out = tmp_path / "sigma.json"
        result = _invoke(
            runner,
            [
                "sigma", "--law", "bernoulli:0.5", "--n", "50", "--reps", "10",
                "--seed", "2", "--sigmas", "0,1.5", "--format", "json", "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        rows = _read_json(out)["rows"]
        assert [r["sigma"] for r in rows] == [0.0, 1.5]
        assert rows[0]["V"] == pytest.approx(2.0, abs=1e-9)
        assert rows[1]["V"] == pytest.approx(4.0, abs=1e-9)

    def test_ctrw_json(self, runner, tmp_path):
        out = tmp_path / "ctrw.json"
        result = _invoke(
            runner,
            [
                "ctrw", "--law", "bernoulli:0.5", "--wait", "deterministic_wait",
                "--horizons", "0,2.5,10", "--reps", "4", "--seed", "1",
                "--format", "json", "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        data = _read_json(out)
        assert data["composition_holds"]
        assert data["means"]["0"] == 1.0
        assert "scaling" not in data

    def test_missing_seed_is_config_error(self, runner):
        result = runner.invoke(cli, ["simulate", "--law", "gaussian", "--n", "5", "--reps", "2"])
        assert result.exit_code == 2
        assert "--seed" in result.output


class TestRateCommands:
    def test_ldp_drift_down_is_precondition_error(self, runner):
        result = runner.invoke(cli, ["ldp", "--law", "bernoulli:0.25", "--y", "0.5"])
        assert result.exit_code == 3

    def test_ldp_table(self, runner, tmp_path):
        out = tmp_path / "ldp.json"
        result = _invoke(
            runner,
            [
                "ldp", "--law", "bernoulli:0.5", "--y", "1", "--n-grid", "50,100",
                "--format", "json", "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        row = _read_json(out)["rows"][0]
        assert row["rate"] == pytest.approx(math.log(2.0))
        assert "exact_slope_100" in row

    def test_mdp(self, runner, tmp_path):
        out = tmp_path / "mdp.json"
        result = _invoke(
            runner, ["mdp", "--rho", "0.5", "--y", "1,2", "--format", "json", "--out", str(out)]
        )
        assert result.exit_code == 0
        rates = [r["rate"] for r in _read_json(out)["rows"]]
        assert rates == pytest.approx([0.25, 1.0])

    def test_lil_constant(self, runner, tmp_path):
        out = tmp_path / "lil.json"
        result = _invoke(runner, ["lil", "--rho", "0.5", "--format", "json", "--out", str(out)])
        assert result.exit_code == 0
        assert _read_json(out)["rows"][0]["constant"] == pytest.approx(math.sqrt(math.pi))

    def test_lil_normalizer_grid(self, runner, tmp_path):
        out = tmp_path / "lil.csv"
        result = _invoke(
            runner, ["lil", "--law", "bernoulli:0.5", "--n-grid", "8,1000", "--out", str(out)]
        )
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert math.isnan(frame.loc[0, "normalizer"])
        assert frame.loc[1, "normalizer"] > 0

    def test_bad_number(self, runner):
        result = runner.invoke(cli, ["mdp", "--rho", "0.5", "--y", "abc"])
        assert result.exit_code == 2


class TestVerifyCommands:
    @pytest.fixture
    def small_settings(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text(
            "verify:\n"
            "  spitzer_identity:\n    n_max: 5\n"
            "  sparre_andersen:\n    n_max: 5\n"
        )
        return path

    def test_suites_listing(self, runner):
        result = _invoke(runner, ["suites"])
        assert result.exit_code == 0
        assert "spitzer: spitzer_identity, sparre_andersen" in result.output

    def test_verify_report(self, runner, tmp_path, small_settings):
        out = tmp_path / "report.json"
        result = runner.invoke(
            cli,
            [
                "--config-file", str(small_settings),
                "verify", "--suite", "spitzer", "--seed", "1", "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        report = _read_json(out)
        assert report["passed"]
        assert report["seed"] == 1

    def test_verify_failure_exit_code(self, runner, tmp_path):
        path = tmp_path / "strict.yaml"
        path.write_text(
            "verify:\n"
            "  spitzer_identity:\n    n_max: 3\n    tol: -1.0\n"
            "  sparre_andersen:\n    n_max: 3\n"
        )
        result = runner.invoke(
            cli,
            [
                "--config-file", str(path),
                "verify", "--suite", "spitzer", "--seed", "1",
                "--out", str(tmp_path / "r.json"),
            ],
        )
        assert result.exit_code == 4

    def test_json_logging_flag(self, runner):
        result = _invoke(runner, ["--log-json", "--log-level", "INFO", "suites"])
        assert result.exit_code == 0

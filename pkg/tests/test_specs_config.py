"""
Tests for law specs, experiment configs, validators and settings.
"""

import json

import pytest

from src.models import (
    ContinuousStepLaw,
    ExperimentConfig,
    LatticeStepLaw,
    WaitingFamily,
    build_lattice_law,
    build_step_law,
    build_waiting_law,
    load_experiment,
)
from src.utils import (
    ConfigError,
    ConfigManager,
    validate_experiment_config,
    validate_horizons,
    validate_sigmas,
    validate_y_grid,
    worker_count,
)


class TestLawSpecs:
    def test_flag_form(self):
        law = build_step_law("bernoulli:0.25")
        assert isinstance(law, LatticeStepLaw)
        assert law.prob(1) == 0.25

    def test_lattice_flag_form(self):
        law = build_lattice_law("lattice:-1=0.4,0=0.2,2=0.4")
        assert (law.support_lo, law.support_hi) == (-1, 2)
        assert law.prob(2) == pytest.approx(0.4)

    def test_dict_and_json_forms_agree(self):
        a = build_step_law({"kind": "bernoulli", "p": 0.3})
        b = build_step_law('{"kind": "bernoulli", "p": 0.3}')
        assert a == b

    def test_continuous_defaults(self):
        law = build_step_law("gaussian")
        assert isinstance(law, ContinuousStepLaw)
        assert law.scale == 1.0

    def test_uniform_alias(self):
        assert build_step_law("uniform:2").describe() == {
            "kind": "uniform_symmetric",
            "half_width": 2.0,
        }

    def test_left_continuous_with_cap(self):
        law = build_step_law("left_continuous:0.5,0.5,16")
        assert law.support_hi == 16

    def test_waiting_laws(self):
        wait = build_waiting_law("pareto:0.6")
        assert wait.family is WaitingFamily.PARETO
        assert wait.alpha == 0.6
        assert build_waiting_law("exponential").family is WaitingFamily.EXPONENTIAL

    @pytest.mark.parametrize(
        "spec",
        [
            "bernoulli:1.5",
            "bernoulli:0.5,0.2",
            "unknown:1",
            "lattice:-1=0.5,1",
            '{"kind": "bernoulli"',
            {"kind": "lattice", "pmf": {"1": 1.0}},
        ],
    )
    def test_invalid_specs(self, spec):
        with pytest.raises(ConfigError):
            build_step_law(spec)

    def test_lattice_only_builder(self):
        with pytest.raises(ConfigError):
            build_lattice_law("gaussian")


class TestValidators:
    def test_sigmas(self):
        assert validate_sigmas([0.0, 1.5])[0]
        ok, message = validate_sigmas([-1.0])
        assert not ok
        assert ">= 0" in message

    def test_horizons(self):
        assert validate_horizons([0.0, 10.0, 100.0])[0]
        assert not validate_horizons([])[0]
        assert not validate_horizons([10.0, 10.0])[0]
        assert not validate_horizons([-1.0])[0]

    def test_y_grid(self):
        assert validate_y_grid([0.5, 1.0], upper=1.0)[0]
        assert not validate_y_grid([1.5], upper=1.0)[0]
        assert not validate_y_grid([0.0])[0]

    def test_experiment_config_collects_all_errors(self):
        ok, errors = validate_experiment_config(
            {"n": 1.5, "reps": 0, "format": "xml", "sigmas": [-1]}
        )
        assert not ok
        assert len(errors) == 4


class TestExperimentConfig:
    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({"law": "bernoulli:0.5", "n": 100, "reps": 10, "seed": 1}))
        cfg = load_experiment(str(path), {"n": 200, "reps": None})
        assert cfg.n == 200
        assert cfg.reps == 10
        assert cfg.step_law().prob(1) == 0.5

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(str(tmp_path / "missing.json"), {})

    def test_file_must_hold_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_experiment(str(path), {})

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="bogus"):
            load_experiment(None, {"bogus": 1})

    def test_invalid_law_rejected(self):
        with pytest.raises(ConfigError):
            load_experiment(None, {"law": "bernoulli:2"})

    def test_require_names_flags(self):
        cfg = load_experiment(None, {"law": "gaussian"})
        with pytest.raises(ConfigError, match="--reps, --seed"):
            cfg.require("law", "reps", "seed")

    def test_waiting_law_falls_back_to_alpha(self):
        cfg = ExperimentConfig(alpha=0.6)
        wait = cfg.waiting_law()
        assert wait.family is WaitingFamily.PARETO
        assert wait.alpha == 0.6
        with pytest.raises(ConfigError):
            ExperimentConfig().waiting_law()

    def test_describe_omits_output_path(self):
        cfg = ExperimentConfig(law="gaussian", out="x.csv", seed=3)
        info = cfg.describe()
        assert "out" not in info
        assert info["seed"] == 3


class TestSettings:
    def test_defaults_without_file(self, tmp_path):
        manager = ConfigManager(str(tmp_path / "none.yaml"))
        assert manager.get("engine.block_size") == 65536
        assert manager.get("logging.level") == "WARNING"
        assert manager.get("missing.key", "fallback") == "fallback"

    def test_yaml_layers_over_defaults(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("engine:\n  block_size: 128\n")
        manager = ConfigManager(str(path))
        assert manager.get("engine.block_size") == 128
        assert manager.get("engine.replicate_block") == 256

    def test_set_and_export(self, tmp_path):
        manager = ConfigManager(str(tmp_path / "none.yaml"))
        manager.set("verify.lil_bracket.reps", 5)
        assert manager.to_dict()["verify"]["lil_bracket"]["reps"] == 5

    def test_bad_extension(self, tmp_path):
        path = tmp_path / "settings.toml"
        path.write_text("x = 1\n")
        with pytest.raises(ConfigError):
            ConfigManager(str(path))

    def test_worker_count(self, monkeypatch):
        assert worker_count() == 1
        monkeypatch.setenv("RECORD_LAB_WORKERS", "3")
        assert worker_count() == 3
        monkeypatch.setenv("RECORD_LAB_WORKERS", "zero")
        with pytest.raises(ConfigError):
            worker_count()
        monkeypatch.setenv("RECORD_LAB_WORKERS", "0")
        with pytest.raises(ConfigError):
            worker_count()

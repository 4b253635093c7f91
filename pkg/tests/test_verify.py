"""
Tests for the check registry and suite runner.
"""

import json
import math

import numpy as np
import pytest

from src.utils import AcceptanceFailure, ConfigError
from src.verify import (
    CheckRegistry,
    CheckResult,
    VerifyContext,
    dumps_report,
    identity_laws,
    registry,
    require_pass,
    run_check,
    run_suite,
)
from src.verify.registry import _jsonable

SMALL = {
    "spitzer_identity": {"n_max": 6},
    "sparre_andersen": {"n_max": 6},
    "record_count_law": {"n_max": 6},
}


class TestRegistry:
    def test_suites(self):
        suites = registry.list_suites()
        for name in ("fast", "full", "spitzer", "exact", "deviations", "limits", "monte_carlo"):
            assert name in suites

    def test_full_contains_fast(self):
        fast = {info.name for info in registry.suite("fast")}
        full = {info.name for info in registry.suite("full")}
        assert fast <= full
        assert "weak_convergence_half" in full - fast

    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            registry.suite("nope")

    def test_duplicate_registration(self):
        local = CheckRegistry()

        @local.register("x", "first", ["s"])
        def first(ctx):
            return CheckResult("x", True)

        with pytest.raises(ConfigError):
            local.register("x", "again", ["s"])(first)

    def test_context_parameters(self, default_settings):
        ctx = VerifyContext(seed=1, overrides={"lil_bracket": {"reps": 3}})
        assert ctx.param("lil_bracket", "reps", 100) == 3
        assert ctx.param("lil_bracket", "missing", 7) == 7
        default_settings.set("verify.lil_bracket.n", 123)
        assert ctx.param("lil_bracket", "n", 0) == 123

    def test_identity_laws_have_small_support(self):
        for law in identity_laws():
            assert law.positive_support()[0].size <= 3


class TestRunner:
    def test_enumeration_checks_pass(self):
        report = run_suite("spitzer", seed=7, overrides=SMALL)
        assert report["passed"]
        assert [c["name"] for c in report["checks"]] == ["spitzer_identity", "sparre_andersen"]

    def test_only_filters(self):
        report = run_suite(
            "fast", seed=7, only=["lil_constant", "record_count_law"], overrides=SMALL
        )
        assert {c["name"] for c in report["checks"]} == {"lil_constant", "record_count_law"}
        assert report["passed"]

    def test_failing_tolerance(self):
        report = run_suite(
            "spitzer",
            seed=7,
            overrides={
                "spitzer_identity": {"n_max": 4, "tol": -1.0},
                "sparre_andersen": {"n_max": 4},
            },
        )
        assert not report["passed"]
        with pytest.raises(AcceptanceFailure, match="spitzer_identity"):
            require_pass(report)

    def test_errors_become_failures(self):
        ctx = VerifyContext(seed=1, overrides={"spitzer_identity": {"n_max": 17}})
        result = run_check("spitzer_identity", ctx)
        assert not result.passed
        assert result.error.startswith("PreconditionError")

    def test_large_deviations_reports_convexity(self):
        result = run_check("large_deviations", VerifyContext(seed=1))
        assert result.error is None
        assert result.metrics["convex"]
        assert result.metrics["min_lambda_second"] >= -1e-9

    def test_unknown_check(self):
        with pytest.raises(AcceptanceFailure):
            run_check("bogus", VerifyContext(seed=1))

    def test_require_pass(self):
        report = run_suite("fast", seed=3, only=["lil_constant"])
        assert require_pass(report) == (True, [])

    def test_report_dump_is_deterministic(self):
        a = dumps_report(run_suite("spitzer", seed=5, overrides=SMALL))
        b = dumps_report(run_suite("spitzer", seed=5, overrides=SMALL))
        assert a == b
        assert json.loads(a)["suite"] == "spitzer"


def test_jsonable():
    value = _jsonable(
        {1: np.int64(3), "x": [np.float64(math.nan), math.inf, -math.inf], "b": np.bool_(True)}
    )
    assert value == {"1": 3, "x": ["nan", "inf", "-inf"], "b": True}
    assert _jsonable(np.arange(3)) == [0, 1, 2]

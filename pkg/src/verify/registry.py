"""
Registry of acceptance checks.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..utils.config import get_settings
from ..utils.errors import ConfigError
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class VerifyContext:
    """Seed, worker count and per-check parameter overrides of one verify run."""

    seed: int
    workers: Optional[int] = None
    overrides: Dict[str, Any] = field(default_factory=dict)

    def param(self, check: str, key: str, default: Any) -> Any:
        """verify.<check>.<key> from overrides, then the settings file, then default."""
        scoped = self.overrides.get(check, {})
        if key in scoped:
            return scoped[key]
        return get_settings().get(f"verify.{check}.{key}", default)


@dataclass
class CheckResult:
    """Outcome of one check; metrics hold the measured values and targets."""

    name: str
    passed: bool
    metrics: Dict[str, Any] = field(default_factory=dict)
    tolerance: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "name": self.name,
            "passed": self.passed,
            "metrics": _jsonable(self.metrics),
            "tolerance": _jsonable(self.tolerance),
        }
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class CheckInfo:
    """A registered check and the suites it belongs to."""

    name: str
    description: str
    suites: List[str]
    func: Callable[[VerifyContext], CheckResult]
    stochastic: bool = False


class CheckRegistry:
    """Registry of all acceptance checks."""

    def __init__(self):
        self.checks: Dict[str, CheckInfo] = {}

    def register(
        self, name: str, description: str, suites: List[str], stochastic: bool = False
    ) -> Callable:
        """Decorator adding a check function under name."""

        def decorator(func: Callable[[VerifyContext], CheckResult]):
            if name in self.checks:
                raise ConfigError(f"check {name!r} registered twice")
            self.checks[name] = CheckInfo(name, description, list(suites), func, stochastic)
            return func

        return decorator

    def get_check(self, name: str) -> Optional[CheckInfo]:
        return self.checks.get(name)

    def list_suites(self) -> List[str]:
        return sorted({s for info in self.checks.values() for s in info.suites})

    def suite(self, name: str) -> List[CheckInfo]:
        """Checks of a suite in registration order."""
        found = [info for info in self.checks.values() if name in info.suites]
        if not found:
            raise ConfigError(f"unknown suite {name!r}; choose from {self.list_suites()}")
        return found


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return value


def dumps_report(report: Dict[str, Any]) -> str:
    """Canonical JSON text of a report (sorted keys, fixed separators)."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


registry = CheckRegistry()

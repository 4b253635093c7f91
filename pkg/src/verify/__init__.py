"""
Acceptance suites.
"""

from .registry import CheckInfo, CheckRegistry, CheckResult, VerifyContext, dumps_report, registry
from .suites import identity_laws, require_pass, run_check, run_suite

__all__ = [
    "CheckInfo",
    "CheckRegistry",
    "CheckResult",
    "VerifyContext",
    "dumps_report",
    "registry",
    "identity_laws",
    "require_pass",
    "run_check",
    "run_suite",
]

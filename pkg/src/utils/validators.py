"""
Validation utilities for Record Lab experiment parameters.
"""

import math
from typing import Any, Dict, List, Sequence, Tuple


def validate_sigmas(sigmas: Sequence[float]) -> Tuple[bool, str]:
    """Validate sigma-record thresholds."""
    for s in sigmas:
        if not isinstance(s, (int, float)) or not math.isfinite(s):
            return False, f"sigma {s!r} must be a finite number"
        if s < 0:
            return False, f"sigma {s!r} must be >= 0"
    return True, "Valid"


def validate_horizons(horizons: Sequence[float]) -> Tuple[bool, str]:
    """Validate CTRW horizons: finite, non-negative, strictly ascending."""
    if not horizons:
        return False, "at least one horizon is required"
    for t in horizons:
        if not isinstance(t, (int, float)) or not math.isfinite(t) or t < 0:
            return False, f"horizon {t!r} must be a finite number >= 0"
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        return False, f"horizons must be strictly ascending, got {list(horizons)}"
    return True, "Valid"


def validate_y_grid(ys: Sequence[float], upper: float = math.inf) -> Tuple[bool, str]:
    """Validate a deviation grid: every y in (0, upper]."""
    if not ys:
        return False, "at least one y value is required"
    for y in ys:
        if not isinstance(y, (int, float)) or not 0 < y <= upper:
            return False, f"y={y!r} must lie in (0, {upper:g}]"
    return True, "Valid"


def validate_experiment_config(config: Dict[str, Any]) -> Tuple[bool, List[str]]:
    """Validate the raw (JSON-level) experiment configuration."""
    errors = []

    for field in ("n", "reps", "horizon", "seed"):
        if field in config and config[field] is not None:
            value = config[field]
            if isinstance(value, bool) or not isinstance(value, int):
                errors.append(f"Field '{field}' must be an integer")
            elif value < (1 if field in ("reps", "horizon") else 0):
                errors.append(f"Field '{field}' is out of range: {value}")

    if config.get("sigmas"):
        ok, message = validate_sigmas(config["sigmas"])
        if not ok:
            errors.append(f"Field 'sigmas': {message}")

    if config.get("horizons"):
        ok, message = validate_horizons(config["horizons"])
        if not ok:
            errors.append(f"Field 'horizons': {message}")

    if config.get("y"):
        ok, message = validate_y_grid(config["y"])
        if not ok:
            errors.append(f"Field 'y': {message}")

    if "format" in config and config["format"] not in ("csv", "json"):
        errors.append("Invalid format. Must be one of: ['csv', 'json']")

    return len(errors) == 0, errors

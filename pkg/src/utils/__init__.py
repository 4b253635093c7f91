"""
Utility module for Record Lab.
"""

from .config import ConfigManager, get_settings, use_settings, worker_count
from .errors import AcceptanceFailure, ConfigError, PreconditionError, RecordLabError
from .logger import configure_root, get_logger, setup_logger
from .validators import (
    validate_experiment_config,
    validate_horizons,
    validate_sigmas,
    validate_y_grid,
)

__all__ = [
    "ConfigManager",
    "get_settings",
    "use_settings",
    "worker_count",
    "AcceptanceFailure",
    "ConfigError",
    "PreconditionError",
    "RecordLabError",
    "configure_root",
    "get_logger",
    "setup_logger",
    "validate_experiment_config",
    "validate_horizons",
    "validate_sigmas",
    "validate_y_grid",
]

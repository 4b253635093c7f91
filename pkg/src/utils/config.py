"""
Configuration management for Record Lab.
"""

import os
import json
from typing import Dict, Any, Optional

import yaml
from dotenv import load_dotenv

from .errors import ConfigError

load_dotenv()

WORKERS_ENV = "RECORD_LAB_WORKERS"


class ConfigManager:
    """Manage system configuration."""

    def __init__(self, config_file: str = "config/config.yaml"):
        self.config_file = config_file
        self.config: Dict[str, Any] = {}
        self._load_config()

    def _load_config(self):
        """Load configuration from file, layered over the defaults."""
        self.config = self._get_default_config()
        if not os.path.exists(self.config_file):
            return

        try:
            with open(self.config_file, "r") as f:
                if self.config_file.endswith((".yaml", ".yml")):
                    loaded = yaml.safe_load(f) or {}
                elif self.config_file.endswith(".json"):
                    loaded = json.load(f)
                else:
                    raise ConfigError(
                        f"Unsupported config format: {self.config_file} "
                        "(use .yaml, .yml or .json)"
                    )
        except (OSError, yaml.YAMLError, json.JSONDecodeError) as e:
            raise ConfigError(f"Failed to load config {self.config_file}: {e}") from e

        if not isinstance(loaded, dict):
            raise ConfigError(f"Config {self.config_file} must hold a mapping")
        _deep_update(self.config, loaded)

    def _get_default_config(self) -> Dict[str, Any]:
        """Get default configuration."""
        return {
            "engine": {
                "block_size": 65536,
                "replicate_block": 256,
                "cell_cap": 50_000_000,
                "enumeration_cap": 100_000_000,
                "truncation_eps": 1e-12,
                "max_support": 2**20,
            },
            "logging": {
                "level": "WARNING",
                "format": "text",
                "file": None,
            },
            "verify": {},
        }

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value."""
        keys = key.split(".")
        value = self.config

        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default

        return value

    def set(self, key: str, value: Any):
        """Set configuration value."""
        keys = key.split(".")
        config = self.config

        for k in keys[:-1]:
            if k not in config:
                config[k] = {}
            config = config[k]

        config[keys[-1]] = value

    def to_dict(self) -> Dict[str, Any]:
        """Get configuration as dictionary."""
        return json.loads(json.dumps(self.config))


def _deep_update(base: Dict[str, Any], extra: Dict[str, Any]) -> None:
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value


def worker_count(default: int = 1) -> int:
    """Worker count from the environment; the only setting read from it."""
    raw: Optional[str] = os.getenv(WORKERS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        workers = int(raw)
    except ValueError as e:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from e
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


_settings: Optional[ConfigManager] = None


def get_settings() -> ConfigManager:
    """Process-wide configuration, loaded lazily from config/config.yaml."""
    global _settings
    if _settings is None:
        _settings = ConfigManager()
    return _settings


def use_settings(manager: ConfigManager) -> None:
    """Install a configuration (used by the CLI --config-file option and tests)."""
    global _settings
    _settings = manager

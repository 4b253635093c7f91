"""
Logging configuration for Record Lab.
"""

import logging
import os
from typing import Optional

from pythonjsonlogger import jsonlogger


_loggers = {}

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
JSON_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


def setup_logger(
    name: str,
    level: str = "INFO",
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
    json_format: bool = False,
) -> logging.Logger:
    """Set up logger."""

    if name in _loggers:
        return _loggers[name]

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))
    logger.propagate = False

    # Console handler, stderr keeps stdout free for data
    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, level.upper()))

    if json_format:
        formatter = jsonlogger.JsonFormatter(format_string or JSON_FORMAT)
    else:
        formatter = logging.Formatter(format_string or DEFAULT_FORMAT)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # File handler
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(getattr(logging, level.upper()))
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    _loggers[name] = logger
    return logger


def configure_root(
    level: str = "INFO", log_file: Optional[str] = None, json_format: bool = False
) -> logging.Logger:
    """(Re)configure the package logger that every module logger hangs off."""
    _loggers.pop("record_lab", None)
    logger = logging.getLogger("record_lab")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    return setup_logger(
        "record_lab", level=level, log_file=log_file, json_format=json_format
    )


def get_logger(name: str) -> logging.Logger:
    """Get logger."""
    if not name.startswith("record_lab"):
        name = f"record_lab.{name}"
    if name not in _loggers:
        logger = logging.getLogger(name)
        # children propagate to the configured package logger
        if "record_lab" not in _loggers:
            setup_logger("record_lab", level="WARNING")
        _loggers[name] = logger
    return _loggers[name]

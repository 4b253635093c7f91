"""
Exception hierarchy for Record Lab.

Every error raised on purpose by the library derives from RecordLabError and
carries the process exit code the CLI should use.
"""


class RecordLabError(ValueError):
    """Base error."""

    exit_code = 1


class ConfigError(RecordLabError):
    """Invalid configuration, flag or law specification."""

    exit_code = 2


class PreconditionError(RecordLabError):
    """An operation was called outside its domain."""

    exit_code = 3


class AcceptanceFailure(RecordLabError):
    """A verification check did not pass."""

    exit_code = 4

"""
Experiment configuration shared by every command.

A JSON config file mirrors the command-line flags; flags given explicitly
override the file.
"""

import json
import os
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from ..utils.errors import ConfigError
from ..utils.validators import (
    validate_experiment_config,
    validate_horizons,
    validate_sigmas,
    validate_y_grid,
)
from .specs import build_step_law, build_waiting_law, parse_step_spec, parse_wait_spec
from .steps import StepLaw, WaitingLaw

LawField = Optional[Union[str, Dict[str, Any]]]


class ExperimentConfig(BaseModel):
    """Validated parameters of one command invocation."""

    law: LawField = None
    wait: LawField = None
    n: Optional[int] = Field(None, ge=0)
    reps: Optional[int] = Field(None, ge=1)
    horizon: Optional[int] = Field(None, ge=1)
    sigmas: List[float] = Field(default_factory=list)
    threshold: Optional[Tuple[float, float]] = None
    horizons: List[float] = Field(default_factory=list)
    y: List[float] = Field(default_factory=list)
    n_grid: List[int] = Field(default_factory=list)
    rho: Optional[float] = Field(None, ge=0.0, le=1.0)
    alpha: Optional[float] = Field(None, gt=0.0, lt=1.0)
    seed: Optional[int] = Field(None, ge=0)
    suite: str = "fast"
    strong: bool = False
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    model_config = {"extra": "forbid"}

    @field_validator("law")
    @classmethod
    def validate_law(cls, v):
        if v is not None:
            try:
                parse_step_spec(v)
            except ConfigError as e:
                raise ValueError(str(e)) from e
        return v

    @field_validator("wait")
    @classmethod
    def validate_wait(cls, v):
        if v is not None:
            try:
                parse_wait_spec(v)
            except ConfigError as e:
                raise ValueError(str(e)) from e
        return v

    @field_validator("sigmas")
    @classmethod
    def validate_sigma_list(cls, v):
        ok, message = validate_sigmas(v)
        if not ok:
            raise ValueError(message)
        return v

    @field_validator("horizons")
    @classmethod
    def validate_horizon_list(cls, v):
        if v:
            ok, message = validate_horizons(v)
            if not ok:
                raise ValueError(message)
        return v

    @field_validator("y")
    @classmethod
    def validate_y(cls, v):
        if v:
            ok, message = validate_y_grid(v)
            if not ok:
                raise ValueError(message)
        return v

    def require(self, *fields: str) -> None:
        """Raise ConfigError naming every missing field."""
        missing = [f for f in fields if getattr(self, f) in (None, [], ())]
        if missing:
            flags = ", ".join("--" + f.replace("_", "-") for f in missing)
            raise ConfigError(f"missing required parameters: {flags}")

    def step_law(self) -> StepLaw:
        self.require("law")
        return build_step_law(self.law)

    def waiting_law(self) -> WaitingLaw:
        if self.wait is None:
            if self.alpha is None:
                raise ConfigError("give --wait or --alpha for the waiting-time law")
            return build_waiting_law({"kind": "pareto", "alpha": self.alpha})
        return build_waiting_law(self.wait)

    def describe(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"out"}, exclude_none=True)


def load_experiment(path: Optional[str], flags: Dict[str, Any]) -> ExperimentConfig:
    """Merge a JSON config file with explicit flags (flags win) and validate."""
    data: Dict[str, Any] = {}
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file {path} does not exist")
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"failed to read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
    data.update({k: v for k, v in flags.items() if v is not None and v != ()})

    ok, errors = validate_experiment_config(data)
    if not ok:
        raise ConfigError("invalid experiment config:\n  " + "\n  ".join(errors))
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        problems = "\n  ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError("invalid experiment config:\n  " + problems) from e

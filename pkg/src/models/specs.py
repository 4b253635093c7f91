"""
Law specifications as they appear in experiment configs and on the command line.

JSON form:   {"kind": "bernoulli", "p": 0.5}
Flag form:   bernoulli:0.5   left_continuous:0.5,0.5   lattice:-1=0.25,0=0.5,1=0.25
"""

import json
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, field_validator

from ..utils.config import get_settings
from ..utils.errors import ConfigError
from .steps import (
    LatticeStepLaw,
    StepLaw,
    WaitingLaw,
    make_bernoulli_walk,
    make_cauchy,
    make_deterministic,
    make_deterministic_wait,
    make_exponential_wait,
    make_gaussian,
    make_lattice,
    make_left_continuous,
    make_pareto_wait,
    make_uniform_symmetric,
)


class BernoulliSpec(BaseModel):
    """Simple walk: +1 with probability p, -1 otherwise."""

    kind: Literal["bernoulli"]
    p: float = Field(..., gt=0.0, lt=1.0, description="P(X = +1)")

    def build(self) -> StepLaw:
        return make_bernoulli_walk(self.p)


class LatticeSpec(BaseModel):
    """Arbitrary finite lattice law."""

    kind: Literal["lattice"]
    pmf: Dict[int, float] = Field(..., description="step -> probability")

    @field_validator("pmf")
    @classmethod
    def validate_pmf(cls, v):
        if len(v) < 2:
            raise ValueError("lattice pmf needs at least two support points")
        if any(p < 0 for p in v.values()):
            raise ValueError("lattice probabilities must be non-negative")
        if abs(sum(v.values()) - 1.0) > 1e-9:
            raise ValueError(f"lattice probabilities sum to {sum(v.values())}, not 1")
        return v

    def build(self) -> StepLaw:
        return make_lattice(self.pmf)


class LeftContinuousSpec(BaseModel):
    """phi(s) = s + gamma/(1+beta) (1-s)^(1+beta) family."""

    kind: Literal["left_continuous"]
    beta: float = Field(..., gt=0.0, lt=1.0)
    gamma: float = Field(..., gt=0.0, lt=1.0)
    eps: Optional[float] = Field(default=None, gt=0.0, le=1e-12)
    max_support: Optional[int] = Field(default=None, ge=1)

    def build(self) -> StepLaw:
        settings = get_settings()
        return make_left_continuous(
            self.beta,
            self.gamma,
            eps=self.eps or settings.get("engine.truncation_eps", 1e-12),
            max_support=self.max_support or settings.get("engine.max_support"),
        )


class DeterministicSpec(BaseModel):
    """Point-mass integer step."""

    kind: Literal["deterministic"]
    step: int

    def build(self) -> StepLaw:
        return make_deterministic(self.step)


class GaussianSpec(BaseModel):
    kind: Literal["gaussian"]
    sigma: float = Field(default=1.0, gt=0.0)

    def build(self) -> StepLaw:
        return make_gaussian(self.sigma)


class UniformSpec(BaseModel):
    kind: Literal["uniform_symmetric"]
    half_width: float = Field(default=1.0, gt=0.0)

    def build(self) -> StepLaw:
        return make_uniform_symmetric(self.half_width)


class CauchySpec(BaseModel):
    kind: Literal["cauchy"]
    scale: float = Field(default=1.0, gt=0.0)

    def build(self) -> StepLaw:
        return make_cauchy(self.scale)


class ParetoSpec(BaseModel):
    kind: Literal["pareto"]
    alpha: float = Field(..., gt=0.0, lt=1.0)
    scale: float = Field(default=1.0, gt=0.0)

    def build(self) -> WaitingLaw:
        return make_pareto_wait(self.alpha, self.scale)


class ExponentialSpec(BaseModel):
    kind: Literal["exponential"]
    scale: float = Field(default=1.0, gt=0.0)

    def build(self) -> WaitingLaw:
        return make_exponential_wait(self.scale)


class DeterministicWaitSpec(BaseModel):
    kind: Literal["deterministic_wait"]
    scale: float = Field(default=1.0, gt=0.0)

    def build(self) -> WaitingLaw:
        return make_deterministic_wait(self.scale)


StepSpec = Annotated[
    Union[
        BernoulliSpec,
        LatticeSpec,
        LeftContinuousSpec,
        DeterministicSpec,
        GaussianSpec,
        UniformSpec,
        CauchySpec,
    ],
    Field(discriminator="kind"),
]

WaitSpec = Annotated[
    Union[ParetoSpec, ExponentialSpec, DeterministicWaitSpec],
    Field(discriminator="kind"),
]

_step_adapter = TypeAdapter(StepSpec)
_wait_adapter = TypeAdapter(WaitSpec)

# positional argument names for the compact flag form
_POSITIONAL: Dict[str, List[str]] = {
    "bernoulli": ["p"],
    "left_continuous": ["beta", "gamma", "max_support"],
    "deterministic": ["step"],
    "gaussian": ["sigma"],
    "uniform_symmetric": ["half_width"],
    "uniform": ["half_width"],
    "cauchy": ["scale"],
    "pareto": ["alpha", "scale"],
    "exponential": ["scale"],
    "deterministic_wait": ["scale"],
}


def _flag_to_dict(text: str) -> Dict[str, Any]:
    kind, _, args = text.partition(":")
    kind = kind.strip()
    if kind == "uniform":
        kind = "uniform_symmetric"
    data: Dict[str, Any] = {"kind": kind}
    if not args:
        return data
    if kind == "lattice":
        pmf: Dict[str, str] = {}
        for item in args.split(","):
            step, eq, prob = item.partition("=")
            if not eq:
                raise ConfigError(
                    f"lattice entries look like 'step=prob', got {item!r} in {text!r}"
                )
            pmf[step.strip()] = prob.strip()
        data["pmf"] = pmf
        return data
    names = _POSITIONAL.get(kind)
    if names is None:
        raise ConfigError(f"unknown law kind {kind!r} in {text!r}")
    values = [v.strip() for v in args.split(",")]
    if len(values) > len(names):
        raise ConfigError(
            f"{kind} takes at most {len(names)} arguments ({', '.join(names)}), "
            f"got {len(values)} in {text!r}"
        )
    data.update(dict(zip(names, values)))
    return data


def _as_dict(spec: Union[str, Dict[str, Any]]) -> Dict[str, Any]:
    if isinstance(spec, dict):
        return spec
    text = spec.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"law spec is not valid JSON: {e}") from e
    return _flag_to_dict(text)


def _format_errors(err: ValidationError, spec: Any) -> str:
    problems = "; ".join(
        f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in err.errors()
    )
    return f"invalid law spec {spec!r}: {problems}"


def parse_step_spec(spec: Union[str, Dict[str, Any]]):
    """Validated step-law spec model."""
    try:
        return _step_adapter.validate_python(_as_dict(spec))
    except ValidationError as e:
        raise ConfigError(_format_errors(e, spec)) from e


def parse_wait_spec(spec: Union[str, Dict[str, Any]]):
    """Validated waiting-law spec model."""
    try:
        return _wait_adapter.validate_python(_as_dict(spec))
    except ValidationError as e:
        raise ConfigError(_format_errors(e, spec)) from e


def build_step_law(spec: Union[str, Dict[str, Any]]) -> StepLaw:
    return parse_step_spec(spec).build()


def build_waiting_law(spec: Union[str, Dict[str, Any]]) -> WaitingLaw:
    return parse_wait_spec(spec).build()


def build_lattice_law(spec: Union[str, Dict[str, Any]]) -> LatticeStepLaw:
    law = build_step_law(spec)
    if not isinstance(law, LatticeStepLaw):
        raise ConfigError(f"law {spec!r} is not a lattice law")
    return law

"""
Step and waiting-time laws for Record Lab.
"""

from .steps import (
    ContinuousFamily,
    ContinuousStepLaw,
    DriftClass,
    LatticeStepLaw,
    StepLaw,
    WaitingFamily,
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
    require_lattice,
    sample_step,
    sample_waiting,
)
from .streams import make_stream, replicate_streams
from .experiment import ExperimentConfig, load_experiment
from .specs import (
    build_lattice_law,
    build_step_law,
    build_waiting_law,
    parse_step_spec,
    parse_wait_spec,
)

__all__ = [
    "ContinuousFamily",
    "ContinuousStepLaw",
    "DriftClass",
    "LatticeStepLaw",
    "StepLaw",
    "WaitingFamily",
    "WaitingLaw",
    "make_bernoulli_walk",
    "make_cauchy",
    "make_deterministic",
    "make_deterministic_wait",
    "make_exponential_wait",
    "make_gaussian",
    "make_lattice",
    "make_left_continuous",
    "make_pareto_wait",
    "make_uniform_symmetric",
    "require_lattice",
    "sample_step",
    "sample_waiting",
    "ExperimentConfig",
    "load_experiment",
    "make_stream",
    "replicate_streams",
    "build_lattice_law",
    "build_step_law",
    "build_waiting_law",
    "parse_step_spec",
    "parse_wait_spec",
]

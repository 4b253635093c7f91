"""
Discrete-time walk simulation and record counters.
"""

from .trajectory import (
    RecordTracker,
    TrajectoryStats,
    record_count_path,
    run_tracker,
    run_walk,
    walk_stats_from_steps,
)
from .montecarlo import (
    EmpiricalSummary,
    RInfinityEstimate,
    certified_cap,
    empirical_r_infinity,
    monte_carlo,
    record_tail_bound,
)

__all__ = [
    "RecordTracker",
    "TrajectoryStats",
    "record_count_path",
    "run_tracker",
    "run_walk",
    "walk_stats_from_steps",
    "EmpiricalSummary",
    "RInfinityEstimate",
    "certified_cap",
    "empirical_r_infinity",
    "monte_carlo",
    "record_tail_bound",
]

"""
Continuous-time random walks with heavy-tailed waiting times.
"""

from .simulation import (
    CTRWConfig,
    CTRWResult,
    renewal_count,
    scaling_check,
    simulate_ctrw,
    simulate_replicate,
)

__all__ = [
    "CTRWConfig",
    "CTRWResult",
    "renewal_count",
    "scaling_check",
    "simulate_ctrw",
    "simulate_replicate",
]

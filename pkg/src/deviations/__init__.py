"""
Large and moderate deviation rates and iterated-logarithm normalizers.
"""

from .rates import (
    LegendrePoint,
    RateProfile,
    exact_tail_logslope,
    lambda_,
    lambda_convexity,
    lambda_prime,
    lambda_second,
    ldp_rate,
    legendre,
    legendre_point,
    lil_constant,
    lil_grid,
    lil_normalizer,
    lil_running_statistic,
    lil_scale,
    mdp_exact_logslope,
    mdp_rate,
)

__all__ = [
    "LegendrePoint",
    "RateProfile",
    "exact_tail_logslope",
    "lambda_",
    "lambda_convexity",
    "lambda_prime",
    "lambda_second",
    "ldp_rate",
    "legendre",
    "legendre_point",
    "lil_constant",
    "lil_grid",
    "lil_normalizer",
    "lil_running_statistic",
    "lil_scale",
    "mdp_exact_logslope",
    "mdp_rate",
]

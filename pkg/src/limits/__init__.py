"""
Mittag-Leffler limit laws and goodness-of-fit statistics.
"""

from .mittag_leffler import (
    CdfEvaluation,
    MLTarget,
    ks_critical_value,
    ks_distance,
    ks_pvalue,
    ml_cdf,
    ml_cdf_half,
    ml_laplace,
    ml_moment,
    ml_moment_ratio,
    stehfest_invert,
    stehfest_weights,
)

__all__ = [
    "CdfEvaluation",
    "MLTarget",
    "ks_critical_value",
    "ks_distance",
    "ks_pvalue",
    "ml_cdf",
    "ml_cdf_half",
    "ml_laplace",
    "ml_moment",
    "ml_moment_ratio",
    "stehfest_invert",
    "stehfest_weights",
]

"""
Exact laws for lattice walks.
"""

from .spitzer import (
    CRho,
    GeometricLaw,
    Interval,
    LadderEpochLaw,
    SpitzerSeries,
    build_series,
    c_rho,
    chernoff_rate,
    corollary_ratio,
    estimate_rho,
    exceedance_probs,
    expected_ladder_epoch,
    ladder_epoch_pmf,
    ladder_limits,
    m_infinity_law,
    r_infinity_law,
    series_c_rho,
    spitzer_exp,
)
from .records import (
    record_count_distribution,
    record_count_logpmf,
    record_count_mean,
    record_tail_logprob,
)
from .ladder import (
    LadderHeightLaw,
    ladder_height_pmf,
    ladder_height_spitzer,
    renewal_function,
    renewal_left_limit,
    sigma_r_infinity_parameter,
)
from .enumerate import EnumerationResult, brute_force_enumerate

__all__ = [
    "CRho",
    "GeometricLaw",
    "Interval",
    "LadderEpochLaw",
    "SpitzerSeries",
    "build_series",
    "c_rho",
    "chernoff_rate",
    "corollary_ratio",
    "estimate_rho",
    "exceedance_probs",
    "expected_ladder_epoch",
    "ladder_epoch_pmf",
    "ladder_limits",
    "m_infinity_law",
    "r_infinity_law",
    "series_c_rho",
    "spitzer_exp",
    "record_count_distribution",
    "record_count_logpmf",
    "record_count_mean",
    "record_tail_logprob",
    "LadderHeightLaw",
    "ladder_height_pmf",
    "ladder_height_spitzer",
    "renewal_function",
    "renewal_left_limit",
    "sigma_r_infinity_parameter",
    "EnumerationResult",
    "brute_force_enumerate",
]

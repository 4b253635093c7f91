"""
Mittag-Leffler limit laws g_rho: moments, Laplace transform, CDF, and
goodness-of-fit distances.

The law with parameter rho has moments m!/Gamma(1 + m rho) and Laplace
transform E_rho(-s), the Mittag-Leffler function on the negative axis.
g_0 is Exponential(1), g_1 the point mass at 1 and g_1/2 the law of |N(0, 2)|.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np
from scipy import integrate, stats
from scipy.special import erf, factorial, gammaln

from ..utils.errors import ConfigError
from ..utils.logger import get_logger

logger = get_logger(__name__)

STEHFEST_STAGES = 14
VALIDATED_RHO = (0.1, 0.9)

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 1.0:
        raise ConfigError(f"rho must lie in [0, 1], got {rho!r}")


def ml_moment(rho: float, m: int) -> float:
    """m! / Gamma(1 + m rho)."""
    _check_rho(rho)
    if m < 0 or int(m) != m:
        raise ConfigError(f"moment order must be a non-negative integer, got {m!r}")
    return math.exp(gammaln(m + 1.0) - gammaln(1.0 + m * rho))


def ml_moment_ratio(rho: float) -> float:
    """E[M^2] / E[M]^2 = 2 Gamma(1 + rho)^2 / Gamma(1 + 2 rho)."""
    _check_rho(rho)
    return 2.0 * math.exp(2.0 * gammaln(1.0 + rho) - gammaln(1.0 + 2.0 * rho))


def ml_cdf_half(x: ArrayLike) -> ArrayLike:
    """CDF of g_1/2, the half-normal |N(0, 2)|: erf(x / 2) for x >= 0."""
    arr = np.asarray(x, dtype=np.float64)
    out = np.where(arr > 0, erf(np.maximum(arr, 0.0) / 2.0), 0.0)
    return float(out) if out.ndim == 0 else out


def ml_laplace(rho: float, s: float) -> float:
    """E_rho(-s) for s >= 0.

    For 0 < rho < 1 uses the completely monotone representation
    sin(rho pi)/(pi rho) * int_0^inf exp(-(u s)^(1/rho)) / (u^2 + 2u cos(rho pi) + 1) du,
    integrated in v = u s.
    """
    _check_rho(rho)
    if s < 0:
        raise ConfigError(f"ml_laplace is evaluated on s >= 0, got {s!r}")
    if rho == 0.0:
        return 1.0 / (1.0 + s)
    if rho == 1.0:
        return math.exp(-s)
    if s == 0.0:
        return 1.0
    c = math.cos(rho * math.pi)
    power = 1.0 / rho

    def integrand(v: float) -> float:
        u = v / s
        return math.exp(-(v**power)) / (u * u + 2.0 * u * c + 1.0)

    value, _ = integrate.quad(integrand, 0.0, np.inf, limit=200, epsabs=1e-14, epsrel=1e-12)
    return math.sin(rho * math.pi) / (math.pi * rho) * value / s


@lru_cache(maxsize=8)
def stehfest_weights(stages: int = STEHFEST_STAGES) -> np.ndarray:
    """Salzer summation weights V_1..V_stages of the Gaver-Stehfest scheme."""
    if stages % 2:
        raise ConfigError("Gaver-Stehfest needs an even number of stages")
    half = stages // 2
    weights = np.zeros(stages)
    for k in range(1, stages + 1):
        total = 0.0
        for j in range((k + 1) // 2, min(k, half) + 1):
            total += (
                j**half
                * factorial(2 * j, exact=True)
                / (
                    factorial(half - j, exact=True)
                    * factorial(j, exact=True)
                    * factorial(j - 1, exact=True)
                    * factorial(k - j, exact=True)
                    * factorial(2 * j - k, exact=True)
                )
            )
        weights[k - 1] = (-1) ** (k + half) * total
    weights.flags.writeable = False
    return weights


def stehfest_invert(transform: Callable[[float], float], x: float) -> float:
    """f(x) from its Laplace transform by fixed-stage Gaver-Stehfest."""
    weights = stehfest_weights(STEHFEST_STAGES)
    ln2 = math.log(2.0)
    p = np.arange(1, STEHFEST_STAGES + 1) * ln2 / x
    return ln2 / x * float(np.dot(weights, [transform(pk) for pk in p]))


@dataclass(frozen=True)
class CdfEvaluation:
    """CDF values and whether (rho, x) lies in the validated band."""

    values: np.ndarray
    validated: bool


def ml_cdf(rho: float, x: ArrayLike) -> CdfEvaluation:
    """CDF of g_rho by Gaver-Stehfest inversion of E_rho(-s)/s.

    Accuracy is validated for rho in [0.1, 0.9]; outside that band the
    result carries validated=False.
    """
    _check_rho(rho)
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    validated = VALIDATED_RHO[0] <= rho <= VALIDATED_RHO[1]
    if not validated:
        logger.warning("ml_cdf(rho=%s) is outside the validated band %s", rho, VALIDATED_RHO)
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        if xi <= 0.0:
            out[i] = 0.0
            continue
        value = stehfest_invert(lambda s: ml_laplace(rho, s) / s, float(xi))
        out[i] = min(max(value, 0.0), 1.0)
    return CdfEvaluation(out, validated)


@dataclass(frozen=True)
class MLTarget:
    """Mittag-Leffler distribution with parameter rho."""

    rho: float

    def __post_init__(self):
        _check_rho(self.rho)

    def moment(self, m: int) -> float:
        return ml_moment(self.rho, m)

    @property
    def mean(self) -> float:
        return ml_moment(self.rho, 1)

    @property
    def moment_ratio(self) -> float:
        return ml_moment_ratio(self.rho)

    def laplace(self, s: float) -> float:
        return ml_laplace(self.rho, s)

    def cdf(self, x: ArrayLike) -> np.ndarray:
        """Closed forms at rho in {0, 1/2, 1}; Gaver-Stehfest otherwise."""
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if self.rho == 0.0:
            return np.where(xs > 0, -np.expm1(-np.maximum(xs, 0.0)), 0.0)
        if self.rho == 1.0:
            return (xs >= 1.0).astype(np.float64)
        if self.rho == 0.5:
            return np.asarray(ml_cdf_half(xs), dtype=np.float64).reshape(xs.shape)
        return ml_cdf(self.rho, xs).values

    def scaled(self, t: float) -> float:
        """Mean of the inverse stable subordinator marginal t^rho M at time t."""
        return t**self.rho * self.mean


def ks_distance(samples: ArrayLike, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """max over sample points of |F_n(x_i) - F(x_i)|, F_n counting ties."""
    xs = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if xs.size == 0:
        raise ConfigError("ks_distance needs at least one sample")
    ecdf = np.searchsorted(xs, xs, side="right") / xs.size
    target = np.asarray(cdf(xs), dtype=np.float64)
    return float(np.max(np.abs(ecdf - target)))


def ks_pvalue(statistic: float, n: int) -> float:
    """Two-sided Kolmogorov tail probability P(D_n >= statistic)."""
    return float(stats.kstwo.sf(statistic, n))


def ks_critical_value(n: int, level: float = 0.01) -> float:
    return float(stats.kstwo.isf(level, n))

"""
Walk-increment and waiting-time distributions.

Lattice laws live on a bounded integer window and are sampled by inverse CDF;
continuous laws are restricted to symmetric families so that P(S_k >= 0) = 1/2
is known exactly.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln

from ..utils.errors import ConfigError, PreconditionError
from ..utils.logger import get_logger

logger = get_logger(__name__)

PMF_SUM_TOLERANCE = 1e-9
DEFAULT_MAX_SUPPORT = 2**20
MEAN_TOLERANCE = 1e-12


class DriftClass(Enum):
    """Long-run behaviour of the walk."""

    OSCILLATES = "oscillates"
    DRIFTS_UP = "drifts_up"
    DRIFTS_DOWN = "drifts_down"


class ContinuousFamily(Enum):
    """Symmetric continuous step families."""

    GAUSSIAN = "gaussian"
    UNIFORM_SYMMETRIC = "uniform_symmetric"
    CAUCHY = "cauchy"


class WaitingFamily(Enum):
    """Waiting-time families for continuous-time walks."""

    PARETO = "pareto"
    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class LatticeStepLaw:
    """Integer-valued step law on [support_lo, support_hi]."""

    support_lo: int
    support_hi: int
    pmf: np.ndarray = field(compare=False, repr=False)
    truncation_mass: float = 0.0
    name: str = "lattice"
    params: Dict[str, float] = field(default_factory=dict, compare=False)
    nominal_mean: Optional[float] = None
    rho_hint: Optional[float] = None
    allow_degenerate: bool = field(default=False, repr=False)

    def __post_init__(self):
        pmf = np.array(self.pmf, dtype=np.float64)
        if pmf.ndim != 1 or len(pmf) != self.support_hi - self.support_lo + 1:
            raise ConfigError(
                f"pmf length {pmf.size} does not match support "
                f"[{self.support_lo}, {self.support_hi}]"
            )
        if np.any(pmf < 0) or not np.all(np.isfinite(pmf)):
            raise ConfigError("pmf values must be finite and non-negative")
        total = float(pmf.sum())
        if abs(total - 1.0) > PMF_SUM_TOLERANCE:
            raise ConfigError(f"pmf must sum to 1, got {total!r}")
        if not 0.0 <= self.truncation_mass < 1.0:
            raise ConfigError("truncation_mass must lie in [0, 1)")
        if np.count_nonzero(pmf) < 2 and not self.allow_degenerate:
            raise ConfigError(
                "step law is degenerate (fewer than two support points with "
                "positive mass); use make_deterministic for boundary checks"
            )
        pmf.flags.writeable = False
        object.__setattr__(self, "pmf", pmf)

        cdf = np.cumsum(pmf)
        cdf /= cdf[-1]
        cdf[-1] = 1.0
        cdf.flags.writeable = False
        object.__setattr__(self, "_cdf", cdf)

    @property
    def values(self) -> np.ndarray:
        return np.arange(self.support_lo, self.support_hi + 1, dtype=np.int64)

    @property
    def width(self) -> int:
        return self.support_hi - self.support_lo + 1

    @property
    def mean(self) -> float:
        return float(np.dot(self.values, self.pmf))

    @property
    def is_right_continuous(self) -> bool:
        """Largest step is +1 and is taken with positive probability."""
        return self.support_hi == 1 and self.pmf[-1] > 0

    @property
    def upward_skip_free(self) -> bool:
        """No step exceeds +1; the maximum moves up one level at a time."""
        return self.support_hi <= 1

    @property
    def drift_class(self) -> DriftClass:
        mean = self.mean if self.nominal_mean is None else self.nominal_mean
        # rounding in pmf arithmetic must not turn a centred law into a drift
        if mean > MEAN_TOLERANCE:
            return DriftClass.DRIFTS_UP
        if mean < -MEAN_TOLERANCE:
            return DriftClass.DRIFTS_DOWN
        return DriftClass.OSCILLATES

    @property
    def rho(self) -> float:
        """Limit of P(S_k >= 0)."""
        drift = self.drift_class
        if drift is DriftClass.DRIFTS_UP:
            return 1.0
        if drift is DriftClass.DRIFTS_DOWN:
            return 0.0
        # bounded zero-mean steps are in the normal domain of attraction
        return 0.5 if self.rho_hint is None else self.rho_hint

    def prob(self, k: int) -> float:
        if k < self.support_lo or k > self.support_hi:
            return 0.0
        return float(self.pmf[k - self.support_lo])

    def positive_support(self) -> Tuple[np.ndarray, np.ndarray]:
        """Support points with positive mass and their probabilities."""
        mask = self.pmf > 0
        return self.values[mask], self.pmf[mask]

    def log_mgf(self, theta: float) -> float:
        """log E exp(theta X)."""
        values, probs = self.positive_support()
        exponents = theta * values.astype(np.float64)
        top = exponents.max()
        return float(top + np.log(np.dot(probs, np.exp(exponents - top))))

    def sample(self, stream: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF draws as int64."""
        u = stream.random(size)
        idx = np.searchsorted(self._cdf, u, side="right")
        np.minimum(idx, self.width - 1, out=idx)
        return idx.astype(np.int64) + self.support_lo

    def describe(self) -> Dict[str, Any]:
        info: Dict[str, Any] = {"kind": self.name, **self.params}
        info["support"] = [self.support_lo, self.support_hi]
        if self.truncation_mass:
            info["truncation_mass"] = self.truncation_mass
        return info


@dataclass(frozen=True)
class ContinuousStepLaw:
    """Continuous step law symmetric about zero."""

    family: ContinuousFamily
    scale: float = 1.0

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ConfigError(f"{self.family.value} scale must be positive")

    @property
    def name(self) -> str:
        return self.family.value

    @property
    def drift_class(self) -> DriftClass:
        return DriftClass.OSCILLATES

    @property
    def rho(self) -> float:
        return 0.5

    def sample(self, stream: np.random.Generator, size: int) -> np.ndarray:
        if self.family is ContinuousFamily.GAUSSIAN:
            return stream.standard_normal(size) * self.scale
        if self.family is ContinuousFamily.UNIFORM_SYMMETRIC:
            return stream.uniform(-self.scale, self.scale, size)
        return stream.standard_cauchy(size) * self.scale

    def describe(self) -> Dict[str, Any]:
        key = {
            ContinuousFamily.GAUSSIAN: "sigma",
            ContinuousFamily.UNIFORM_SYMMETRIC: "half_width",
            ContinuousFamily.CAUCHY: "scale",
        }[self.family]
        return {"kind": self.family.value, key: self.scale}


StepLaw = Union[LatticeStepLaw, ContinuousStepLaw]


@dataclass(frozen=True)
class WaitingLaw:
    """Waiting time between jumps of a continuous-time walk."""

    family: WaitingFamily
    scale: float = 1.0
    alpha: Optional[float] = None

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ConfigError("waiting-time scale must be positive")
        if self.family is WaitingFamily.PARETO:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ConfigError(
                    f"pareto alpha must lie in (0, 1), got {self.alpha!r}"
                )

    def survival(self, x: float) -> float:
        """1 - G(x)."""
        if self.family is WaitingFamily.PARETO:
            return 1.0 if x < self.scale else (x / self.scale) ** (-self.alpha)
        if self.family is WaitingFamily.EXPONENTIAL:
            return 1.0 if x < 0 else math.exp(-x / self.scale)
        return 1.0 if x < self.scale else 0.0

    def inverse_survival(self, u: np.ndarray) -> np.ndarray:
        """x with 1 - G(x) = u, for u in (0, 1]."""
        u = np.asarray(u, dtype=np.float64)
        if self.family is WaitingFamily.PARETO:
            return self.scale * u ** (-1.0 / self.alpha)
        if self.family is WaitingFamily.EXPONENTIAL:
            return -self.scale * np.log(u)
        return np.full_like(u, self.scale)

    @property
    def slowly_varying_constant(self) -> float:
        """L_1 in 1 - G(x) ~ x^-alpha L_1 / Gamma(1 - alpha)."""
        if self.family is not WaitingFamily.PARETO:
            raise PreconditionError("L_1 is defined for pareto waits only")
        return math.gamma(1.0 - self.alpha) * self.scale**self.alpha

    def sample(self, stream: np.random.Generator, size: int) -> np.ndarray:
        # 1 - U lies in (0, 1], so the pareto inverse never divides by zero
        u = 1.0 - stream.random(size)
        return self.inverse_survival(u)

    def describe(self) -> Dict[str, Any]:
        info: Dict[str, Any] = {"kind": self.family.value, "scale": self.scale}
        if self.alpha is not None:
            info["alpha"] = self.alpha
        return info


def make_lattice(
    pmf: Mapping[int, float], name: str = "lattice", **extra: Any
) -> LatticeStepLaw:
    """Lattice law from a {step: probability} mapping."""
    if not pmf:
        raise ConfigError("lattice pmf is empty")
    lo, hi = min(pmf), max(pmf)
    arr = np.zeros(hi - lo + 1)
    for k, p in pmf.items():
        arr[int(k) - lo] = float(p)
    return LatticeStepLaw(lo, hi, arr, name=name, **extra)


def make_bernoulli_walk(p: float) -> LatticeStepLaw:
    """Steps +1 with probability p and -1 otherwise."""
    if not 0.0 < p < 1.0:
        raise ConfigError(f"bernoulli p must lie in (0, 1), got {p!r}")
    return make_lattice({-1: 1.0 - p, 1: p}, name="bernoulli", params={"p": p})


def make_deterministic(step: int) -> LatticeStepLaw:
    """Point mass at an integer step; only for boundary checks."""
    return LatticeStepLaw(
        int(step),
        int(step),
        np.ones(1),
        name="deterministic",
        params={"step": int(step)},
        allow_degenerate=True,
    )


def _left_continuous_tail_mass(beta: float, c: float, j: np.ndarray) -> np.ndarray:
    """Mass of steps >= j for the untruncated family (j >= 1).

    Uses sum_{i<=J} (-1)^i C(a, i) = (-1)^J C(a - 1, J) with a = 1 + beta.
    """
    j = np.asarray(j, dtype=np.float64)
    log_binom = (
        math.log(beta) + gammaln(j - beta) - gammaln(1.0 - beta) - gammaln(j + 1.0)
    )
    return c * np.exp(log_binom)


def make_left_continuous(
    beta: float,
    gamma: float,
    eps: float = 1e-12,
    max_support: Optional[int] = DEFAULT_MAX_SUPPORT,
) -> LatticeStepLaw:
    """Left-continuous law with phi(s) = s + gamma/(1+beta) (1-s)^(1+beta).

    p_k is the coefficient of s^(k+1) in phi. The positive tail is cut at the
    smallest K whose residual mass is below eps (or at max_support) and the
    retained mass renormalized proportionally.
    """
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"beta must lie in (0, 1), got {beta!r}")
    if not 0.0 < gamma < 1.0:
        raise ConfigError(f"gamma must lie in (0, 1), got {gamma!r}")
    if not 0.0 < eps <= 1e-12:
        raise ConfigError(f"eps must lie in (0, 1e-12], got {eps!r}")
    if max_support is not None and max_support < 1:
        raise ConfigError("max_support must be >= 1")

    a = 1.0 + beta
    c = gamma / a

    # residual mass after keeping steps <= K is the tail from j = K + 1 on
    lo_j, hi_j = 2, 2
    while _left_continuous_tail_mass(beta, c, hi_j + 1) >= eps:
        lo_j, hi_j = hi_j, hi_j * 2
    while lo_j < hi_j:
        mid = (lo_j + hi_j) // 2
        if _left_continuous_tail_mass(beta, c, mid + 1) < eps:
            hi_j = mid
        else:
            lo_j = mid + 1
    k_max = int(hi_j)
    if max_support is not None and k_max > max_support:
        logger.warning(
            "left_continuous(beta=%s, gamma=%s): support cap %d binds before "
            "residual mass %.1e (needs K=%d)",
            beta,
            gamma,
            max_support,
            eps,
            k_max,
        )
        k_max = int(max_support)
    truncation_mass = float(_left_continuous_tail_mass(beta, c, k_max + 1))

    # coefficient of s^j in (1 - s)^a is (-1)^j C(a, j); ratio (j - 1 - a)/j
    j = np.arange(2, k_max + 2, dtype=np.float64)
    coef = a * beta / 2.0 * np.cumprod(np.concatenate(([1.0], (j[1:] - 1.0 - a) / j[1:])))
    pmf = np.empty(k_max + 2)
    pmf[0] = c
    pmf[1] = 1.0 - gamma
    pmf[2:] = c * coef
    pmf /= pmf.sum()

    return LatticeStepLaw(
        -1,
        k_max,
        pmf,
        truncation_mass=truncation_mass,
        name="left_continuous",
        params={"beta": beta, "gamma": gamma},
        nominal_mean=0.0,
        rho_hint=1.0 / a,
    )


def make_gaussian(sigma: float = 1.0) -> ContinuousStepLaw:
    return ContinuousStepLaw(ContinuousFamily.GAUSSIAN, sigma)


def make_uniform_symmetric(half_width: float = 1.0) -> ContinuousStepLaw:
    return ContinuousStepLaw(ContinuousFamily.UNIFORM_SYMMETRIC, half_width)


def make_cauchy(scale: float = 1.0) -> ContinuousStepLaw:
    return ContinuousStepLaw(ContinuousFamily.CAUCHY, scale)


def make_pareto_wait(alpha: float, scale: float = 1.0) -> WaitingLaw:
    return WaitingLaw(WaitingFamily.PARETO, scale, alpha)


def make_exponential_wait(scale: float = 1.0) -> WaitingLaw:
    return WaitingLaw(WaitingFamily.EXPONENTIAL, scale)


def make_deterministic_wait(scale: float = 1.0) -> WaitingLaw:
    return WaitingLaw(WaitingFamily.DETERMINISTIC, scale)


def sample_step(law: StepLaw, stream: np.random.Generator, size: Optional[int] = None):
    """One step (size=None) or an array of steps drawn from law."""
    draws = law.sample(stream, 1 if size is None else size)
    return draws[0].item() if size is None else draws


def sample_waiting(
    law: WaitingLaw, stream: np.random.Generator, size: Optional[int] = None
):
    """One waiting time (size=None) or an array of them."""
    draws = law.sample(stream, 1 if size is None else size)
    return float(draws[0]) if size is None else draws


def require_lattice(law: StepLaw, operation: str) -> LatticeStepLaw:
    if not isinstance(law, LatticeStepLaw):
        raise PreconditionError(f"{operation} requires a lattice step law, got {law.name}")
    return law

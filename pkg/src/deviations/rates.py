"""
Rate functions for record counts: the ladder-epoch cumulant Lambda, its
Legendre transform, the large and moderate deviation rates, the iterated
logarithm constant and normalizer, and exact tail slopes to compare with.

Lambda(lam) = log E(exp(lam T_1); T_1 < inf) = log[1 - exp(-sum_k e^(lam k) q_k / k)]
on lam <= 0. Beyond the horizon q_k is replaced by rho, which turns the tail
of each series into a closed form.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.special import gammaln

from ..exact.records import record_tail_logprob
from ..exact.spitzer import (
    Interval,
    SpitzerSeries,
    build_series,
    c_rho,
    expected_ladder_epoch,
)
from ..models.steps import DriftClass, StepLaw
from ..utils.errors import ConfigError, PreconditionError
from ..utils.logger import get_logger
from ..walk.montecarlo import monte_carlo

logger = get_logger(__name__)

TERM_CUTOFF = 1e-16
BISECTION_STEPS = 200
BISECTION_TOL = 1e-10
LAMBDA_FLOOR = -700.0
LAMBDA_CEILING = -1e-15


@dataclass
class RateProfile:
    """Cumulant machinery of one law over a fixed exact horizon."""

    series: SpitzerSeries
    drift_class: DriftClass
    e_t1: Interval
    p_step_nonneg: float
    flags: Dict[str, Any] = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.series.N

    @property
    def rho(self) -> float:
        return self.series.rho

    @classmethod
    def from_law(cls, law: StepLaw, N: int) -> "RateProfile":
        return cls.from_series(build_series(law, N))

    @classmethod
    def from_series(cls, series: SpitzerSeries) -> "RateProfile":
        return cls(
            series=series,
            drift_class=series.drift_class,
            e_t1=expected_ladder_epoch(series),
            p_step_nonneg=float(series.q[1]),
        )

    def c_rho(self, n: float) -> float:
        return c_rho(self.series.q, self.rho, n).value


def _power_sums(profile: RateProfile, lam: float):
    """(sum x^k q_k/k, sum x^k q_k, sum k x^k q_k) with x = e^lam, tails closed."""
    q = profile.series.q
    N = q.size - 1
    x = math.exp(lam)
    # e^(lam k)/k < 1e-16 beyond kcut
    kcut = N
    if lam < 0:
        kcut = min(N, max(1, int(math.ceil(math.log(TERM_CUTOFF) / lam)) + 1))
    k = np.arange(1, kcut + 1, dtype=np.float64)
    w = np.exp(lam * k) * q[1 : kcut + 1]
    s0 = float(np.sum(w / k))
    s1 = float(np.sum(w))
    s2 = float(np.sum(k * w))
    if kcut == N and profile.rho > 0.0 and x < 1.0:
        rho = profile.rho
        head = np.exp(lam * k)
        s0 += rho * max(-math.log1p(-x) - float(np.sum(head / k)), 0.0)
        tail1 = x ** (N + 1) / (1.0 - x)
        s1 += rho * tail1
        s2 += rho * x ** (N + 1) * ((N + 1) - N * x) / (1.0 - x) ** 2
    return s0, s1, s2


def _check_lambda(profile: RateProfile, lam: float) -> None:
    if lam > 0.0:
        raise ConfigError(f"Lambda is defined on lam <= 0, got {lam!r}")


def lambda_(profile: RateProfile, lam: float) -> float:
    """Lambda(lam) for lam <= 0; Lambda(0) = log(1 - defect)."""
    _check_lambda(profile, lam)
    if lam == 0.0:
        defect = profile.series.defect.value
        return math.log1p(-defect) if defect < 1.0 else -math.inf
    s0, _, _ = _power_sums(profile, lam)
    if s0 <= 0.0:
        return -math.inf
    return math.log(-math.expm1(-s0))


def lambda_prime(profile: RateProfile, lam: float) -> float:
    """Lambda'(lam) = sum x^k q_k / (exp(sum x^k q_k / k) - 1), x = e^lam."""
    _check_lambda(profile, lam)
    if lam == 0.0:
        if profile.drift_class is DriftClass.DRIFTS_UP:
            return profile.e_t1.value
        if profile.drift_class is DriftClass.OSCILLATES:
            return math.inf
        lam = LAMBDA_CEILING
    s0, s1, _ = _power_sums(profile, lam)
    if s0 <= 0.0:
        return 1.0
    return s1 / math.expm1(s0)


def lambda_second(profile: RateProfile, lam: float) -> float:
    _check_lambda(profile, lam)
    s0, s1, s2 = _power_sums(profile, lam)
    if s0 <= 0.0:
        return 0.0
    em1 = math.expm1(s0)
    return s2 / em1 - s1 * s1 * (em1 + 1.0) / (em1 * em1)


def lambda_convexity(
    profile: RateProfile, lo: float = -20.0, hi: float = -1e-3, points: int = 200
) -> float:
    """Smallest Lambda'' over a log-spaced grid of lam in [lo, hi]."""
    if not lo < hi < 0.0:
        raise ConfigError(f"convexity grid needs lo < hi < 0, got [{lo}, {hi}]")
    grid = -np.geomspace(-lo, -hi, points)
    return min(lambda_second(profile, float(lam)) for lam in grid)


@dataclass(frozen=True)
class LegendrePoint:
    """Lambda*(y) with the maximizing lam and the solver residual."""

    y: float
    value: float
    lam: Optional[float]
    residual: float = 0.0
    degenerate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "y": self.y,
            "value": self.value,
            "lam": self.lam,
            "residual": self.residual,
            "degenerate": self.degenerate,
        }


def _bracket(profile: RateProfile, y: float):
    lo = -1.0
    while lambda_prime(profile, lo) >= y and lo > LAMBDA_FLOOR:
        lo = max(lo * 2.0, LAMBDA_FLOOR)
    hi = -1e-3
    while lambda_prime(profile, hi) <= y and hi < LAMBDA_CEILING:
        hi = min(hi * 0.1, LAMBDA_CEILING)
    return lo, hi


def legendre_point(profile: RateProfile, y: float) -> LegendrePoint:
    """sup over lam <= 0 of lam y - Lambda(lam), solved by bisection on Lambda'."""
    if not y > 0:
        raise ConfigError(f"Legendre transform is taken at y > 0, got {y!r}")
    if y < 1.0:
        return LegendrePoint(y, math.inf, None)
    if y == 1.0:
        return LegendrePoint(y, -math.log(profile.p_step_nonneg), -math.inf)
    e_t1 = profile.e_t1.value
    if y >= e_t1:
        logger.warning("y=%s is beyond E(T_1)=%.6g; the rate degenerates to 0", y, e_t1)
        return LegendrePoint(y, 0.0, 0.0, degenerate=True)

    lo, hi = _bracket(profile, y)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if lambda_prime(profile, mid) < y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo)):
            break
    lam = 0.5 * (lo + hi)
    residual = abs(lambda_prime(profile, lam) - y)
    if residual > BISECTION_TOL:
        logger.debug("Legendre bisection at y=%s ended with residual %.3g", y, residual)
    return LegendrePoint(y, lam * y - lambda_(profile, lam), lam, residual)


def legendre(profile: RateProfile, y: float) -> float:
    return legendre_point(profile, y).value


def ldp_rate(profile: RateProfile, y: float) -> float:
    """-lim (1/n) log P(R_n >= n y) = y Lambda*(1/y) for y in (0, 1]."""
    if not 0.0 < y <= 1.0:
        raise ConfigError(f"ldp_rate takes y in (0, 1], got {y!r}")
    if profile.drift_class is DriftClass.DRIFTS_DOWN:
        raise PreconditionError(
            "large deviations of R_n are degenerate for a walk drifting to -infinity "
            "(R_n converges to a geometric total)"
        )
    if profile.drift_class is DriftClass.DRIFTS_UP and y <= 1.0 / profile.e_t1.value:
        raise PreconditionError(
            f"y={y} is at or below the law of large numbers value 1/E(T_1)="
            f"{1.0 / profile.e_t1.value:.6g}"
        )
    return y * legendre(profile, 1.0 / y)


def mdp_rate(rho: float, y: float) -> float:
    """(1 - rho) (rho^rho y)^(1/(1 - rho))."""
    if not 0.0 <= rho < 1.0:
        raise ConfigError(f"mdp_rate needs rho in [0, 1), got {rho!r}")
    if y < 0:
        raise ConfigError(f"y must be >= 0, got {y!r}")
    return (1.0 - rho) * (rho**rho * y) ** (1.0 / (1.0 - rho))


def lil_constant(rho: float) -> float:
    """Gamma(rho + 1) / (rho^rho (1 - rho)^(1 - rho))."""
    if not 0.0 < rho < 1.0:
        raise ConfigError(f"lil_constant needs rho in (0, 1), got {rho!r}")
    return math.exp(
        gammaln(rho + 1.0) - rho * math.log(rho) - (1.0 - rho) * math.log1p(-rho)
    )


def lil_scale(profile: RateProfile, n: float) -> float:
    """f(n) = n^rho C_rho(1 - 1/n) / Gamma(rho + 1)."""
    rho = profile.rho
    return math.exp(rho * math.log(n) - gammaln(rho + 1.0)) * profile.c_rho(n)


def lil_normalizer(profile: RateProfile, n: float) -> float:
    """f(n / loglog f(n)) loglog f(n)."""
    if not 0.0 < profile.rho < 1.0:
        raise PreconditionError(f"lil_normalizer needs rho in (0, 1), got {profile.rho}")
    if n < 16:
        raise PreconditionError(f"n={n} is too small for the nested loglog (need n >= 16)")
    f = lil_scale(profile, n)
    if f <= math.e:
        raise PreconditionError(f"f({n}) = {f:.4g} <= e, loglog f(n) is not positive")
    ll = math.log(math.log(f))
    shrunk = n / ll
    if shrunk < 1.0:
        raise PreconditionError(f"shrunken argument n/loglog f(n) = {shrunk:.4g} < 1")
    return lil_scale(profile, shrunk) * ll


def _require_tail_regime(profile: RateProfile) -> None:
    if profile.drift_class is DriftClass.DRIFTS_DOWN:
        raise PreconditionError("record-count tails are degenerate for a walk drifting down")


def _tail_threshold(y: float, n: int) -> int:
    return max(int(math.ceil(y * n - 1e-9)), 0)


def exact_tail_logslope(
    profile: RateProfile, y: float, n_grid: Sequence[int], strict: bool = False
) -> pd.DataFrame:
    """-(1/n) log P(R_n >= ceil(y n)) from the exact ladder-epoch law."""
    _require_tail_regime(profile)
    epoch = profile.series.strict_epoch if strict else profile.series.epoch
    rows: List[Dict[str, Any]] = []
    for n in n_grid:
        n = int(n)
        if n < 1:
            raise ConfigError(f"n must be >= 1, got {n}")
        if n > epoch.N:
            raise ConfigError(f"n={n} exceeds the exact horizon {epoch.N}")
        m = _tail_threshold(y, n)
        logp = record_tail_logprob(epoch, n, m)
        rows.append({"n": n, "m": m, "log_prob": logp, "slope": -logp / n})
    return pd.DataFrame(rows, columns=["n", "m", "log_prob", "slope"])


def mdp_exact_logslope(profile: RateProfile, y: float, n: int) -> Dict[str, float]:
    """-log P(R_n >= y C n^rho a(n)) / log n with a(n) = (log n)^(1 - rho).

    C is C_rho(1 - a(n)^(1/(1-rho))/n) = C_rho(1 - log n / n).
    """
    _require_tail_regime(profile)
    rho = profile.rho
    if not 0.0 <= rho < 1.0:
        raise PreconditionError(f"moderate deviations need rho in [0, 1), got {rho}")
    if n > profile.series.epoch.N:
        raise ConfigError(f"n={n} exceeds the exact horizon {profile.series.epoch.N}")
    log_n = math.log(n)
    a_n = log_n ** (1.0 - rho)
    c = profile.c_rho(n / log_n)
    m = int(math.ceil(y * c * n**rho * a_n))
    logp = record_tail_logprob(profile.series.epoch, n, m)
    slope = -logp / log_n
    target = mdp_rate(rho, y)
    return {
        "n": n,
        "y": y,
        "m": m,
        "c_rho": c,
        "log_prob": logp,
        "slope": slope,
        "rate": target,
        "ratio": slope / target if target > 0 else math.inf,
    }


def lil_grid(n: int, points: int = 200, start: int = 16) -> np.ndarray:
    """Log-spaced integer checkpoints in [start, n]."""
    if n < start:
        raise ConfigError(f"n must be >= {start}, got {n}")
    return np.unique(np.geomspace(start, n, points).astype(np.int64))


def lil_running_statistic(
    law: StepLaw,
    profile: RateProfile,
    n: int,
    reps: int,
    seed: int,
    points: int = 200,
    min_loglog: float = 1.0,
    workers: Optional[int] = None,
) -> pd.DataFrame:
    """Per replicate, max over log-spaced k <= n of R_k / lil_normalizer(k).

    Checkpoints with loglog f(k) < min_loglog are skipped.
    """
    grid = [int(k) for k in lil_grid(n, points)]
    usable, norms = [], []
    for k in grid:
        f = lil_scale(profile, k)
        if f <= math.e or math.log(math.log(f)) < min_loglog:
            continue
        try:
            norms.append(lil_normalizer(profile, k))
        except PreconditionError:
            continue
        usable.append(k)
    if not usable:
        raise PreconditionError(f"no checkpoint up to n={n} admits the loglog normalizer")
    summary = monte_carlo(
        law, n, reps, seed, collect=["r_weak"], checkpoints=usable, workers=workers
    )
    ratios = summary.checkpoint_counts / np.asarray(norms)[None, :]
    best = np.argmax(ratios, axis=1)
    constant = lil_constant(profile.rho)
    return pd.DataFrame(
        {
            "replicate": summary.index,
            "statistic": ratios.max(axis=1),
            "argmax_n": np.asarray(usable)[best],
            "final": ratios[:, -1],
            "constant": constant,
        }
    )

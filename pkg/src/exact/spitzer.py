"""
Exact series for lattice walks.

Arrays are indexed by step count: q[k] = P(S_k >= 0) for k = 0..N with
q[0] = 1, q_strict[0] = 0. Everything here is deterministic double-precision
arithmetic; infinite series are truncated at the horizon and the remainder
is bounded with the Chernoff rate of the step law.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import optimize, stats
from scipy.special import gammaln

from ..models.steps import (
    ContinuousStepLaw,
    DriftClass,
    LatticeStepLaw,
    StepLaw,
    require_lattice,
)
from ..utils.config import get_settings
from ..utils.errors import ConfigError, PreconditionError
from ..utils.logger import get_logger

logger = get_logger(__name__)

NO_DECAY_RATIO = 0.9


@dataclass(frozen=True)
class Interval:
    """A value with certified lower and upper bounds."""

    value: float
    lower: float
    upper: float
    certified: bool = True

    @classmethod
    def exact(cls, value: float) -> "Interval":
        return cls(value, value, value)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "certified": self.certified,
        }


def chernoff_rate(law: LatticeStepLaw, negate: bool = False) -> float:
    """inf over theta >= 0 of E exp(theta X) (or of E exp(-theta X)).

    P(S_k >= 0) <= rate**k, so the rate bounds every series tail below.
    """
    values, probs = law.positive_support()
    if negate:
        values = -values
    if values.max() <= 0:
        # E exp(theta X) decreases to P(X = 0)
        return float(probs[values == 0].sum())
    if np.dot(values, probs) >= 0:
        return 1.0

    def log_mgf(theta: float) -> float:
        e = theta * values.astype(np.float64)
        top = e.max()
        return float(top + np.log(np.dot(probs, np.exp(e - top))))

    upper = 1.0
    while log_mgf(upper) < 0.0:
        upper *= 2.0
    res = optimize.minimize_scalar(
        log_mgf, bounds=(0.0, upper), method="bounded", options={"xatol": 1e-12}
    )
    return float(min(math.exp(res.fun), 1.0))


def _series_tail(rate: float, horizon: int) -> float:
    """Bound on sum_{k > horizon} rate**k / k."""
    if rate <= 0.0:
        return 0.0
    if rate >= 1.0:
        return math.inf
    return math.exp((horizon + 1) * math.log(rate)) / ((horizon + 1) * (1.0 - rate))


def _is_simple_walk(law: LatticeStepLaw) -> bool:
    return law.support_lo == -1 and law.support_hi == 1 and law.pmf[1] == 0.0


def _simple_walk_exceedance(law: LatticeStepLaw, N: int) -> Tuple[np.ndarray, np.ndarray]:
    p = float(law.pmf[2])
    k = np.arange(N + 1)
    # S_k = 2U - k with U ~ Binomial(k, p)
    q = stats.binom.sf(np.ceil(k / 2.0) - 1, k, p)
    q_strict = stats.binom.sf(np.floor(k / 2.0), k, p)
    q[0], q_strict[0] = 1.0, 0.0
    return q, q_strict


def check_cells(law: LatticeStepLaw, N: int) -> None:
    cap = float(get_settings().get("engine.cell_cap", 5e7))
    if N * law.width > cap:
        raise PreconditionError(
            f"horizon {N} x support width {law.width} exceeds the cell cap {cap:.0e}; "
            "lower the horizon or raise engine.cell_cap"
        )


def exceedance_probs(law: StepLaw, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """q[k] = P(S_k >= 0) and q_strict[k] = P(S_k > 0) for k = 0..N."""
    lattice = require_lattice(law, "exceedance_probs")
    if N < 1:
        raise ConfigError(f"horizon must be >= 1, got {N}")
    check_cells(lattice, N)
    if _is_simple_walk(lattice):
        return _simple_walk_exceedance(lattice, N)

    kernel = lattice.pmf
    up = max(lattice.support_hi, 0)
    down = max(-lattice.support_lo, 0)
    q = np.empty(N + 1)
    q_strict = np.empty(N + 1)
    q[0], q_strict[0] = 1.0, 0.0

    pmf = np.ones(1)
    offset = 0
    # mass that stays > 0 for the rest of the horizon
    above = 0.0
    for k in range(1, N + 1):
        pmf = np.convolve(pmf, kernel)
        offset += lattice.support_lo
        remaining = N - k

        floor = -remaining * up
        if floor > offset:
            pmf = pmf[floor - offset :]
            offset = floor
        ceiling = remaining * down
        keep = ceiling - offset + 1
        if keep < pmf.size:
            above += float(pmf[max(keep, 0) :].sum())
            pmf = pmf[: max(keep, 0)]

        zero = -offset
        nonneg = float(pmf[max(zero, 0) :].sum())
        positive = float(pmf[max(zero + 1, 0) :].sum())
        q[k] = above + nonneg
        q_strict[k] = above + positive
        if pmf.size == 0:
            q[k:] = above
            q_strict[k:] = above
            break

    np.clip(q, 0.0, 1.0, out=q)
    np.clip(q_strict, 0.0, 1.0, out=q_strict)
    return q, q_strict


def spitzer_exp(q: np.ndarray, N: Optional[int] = None) -> np.ndarray:
    """Coefficients a[0..N] of exp(sum_k q_k y^k / k).

    With q = P(S_k >= 0) this is a[n] = P(L_{n,n} = n); with P(S_k > 0) it is
    P(L_{n,0} = n).
    """
    q = np.asarray(q, dtype=np.float64)
    N = q.size - 1 if N is None else N
    if N > q.size - 1:
        raise ConfigError(f"need q up to {N}, have {q.size - 1}")
    a = np.zeros(N + 1)
    a[0] = 1.0
    for n in range(1, N + 1):
        a[n] = np.dot(q[1 : n + 1], a[n - 1 :: -1]) / n
    return a


def log_series_sum(q: np.ndarray) -> float:
    """sum_{k>=1} q_k / k over the available horizon."""
    k = np.arange(1, q.size)
    return float(np.sum(q[1:] / k))


@dataclass
class LadderEpochLaw:
    """t[n] = P(T_1 = n) for n <= N and the defect P(T_1 = infinity)."""

    t: np.ndarray
    d: np.ndarray
    defect: Interval
    converges: bool

    @property
    def N(self) -> int:
        return self.t.size - 1

    def survival(self) -> np.ndarray:
        """P(T_1 > j) for j = 0..N, built from upper tails so small values stay accurate."""
        tail_beyond = max(1.0 - self.defect.value - float(self.t[1:].sum()), 0.0)
        upper = np.concatenate([np.cumsum(self.t[::-1])[::-1][1:], [0.0]])
        return upper + self.defect.value + tail_beyond


def ladder_epoch_pmf(
    q: np.ndarray,
    N: Optional[int] = None,
    tail_rate: Optional[float] = None,
    converges: bool = True,
) -> LadderEpochLaw:
    """Law of the first weak ladder epoch from exp(-sum q_k y^k / k).

    tail_rate bounds q_k <= tail_rate**k beyond the array and certifies the
    defect interval. converges=False marks walks whose series diverges
    (oscillating or drifting up); their defect is 0.
    """
    q = np.asarray(q, dtype=np.float64)
    N = q.size - 1 if N is None else N
    d = np.zeros(N + 1)
    d[0] = 1.0
    for n in range(1, N + 1):
        d[n] = -np.dot(q[1 : n + 1], d[n - 1 :: -1]) / n
    t = -d
    t[0] = 0.0
    np.clip(t, 0.0, None, out=t)

    if not converges:
        return LadderEpochLaw(t, d, Interval.exact(0.0), False)

    partial = log_series_sum(q)
    if tail_rate is None:
        defect = Interval(math.exp(-partial), 0.0, math.exp(-partial), certified=False)
        logger.warning(
            "defect exp(-%.6g) uses a truncated series without a tail bound", partial
        )
    else:
        tail = _series_tail(tail_rate, q.size - 1)
        defect = Interval(
            math.exp(-partial - tail / 2.0),
            math.exp(-partial - tail),
            math.exp(-partial),
            certified=math.isfinite(tail),
        )
    return LadderEpochLaw(t, d, defect, True)


@dataclass
class SpitzerSeries:
    """Exact series of one step law up to horizon N."""

    law: Dict[str, Any]
    N: int
    q: np.ndarray
    q_strict: np.ndarray
    a: np.ndarray
    a_strict: np.ndarray
    epoch: LadderEpochLaw
    strict_epoch: LadderEpochLaw
    drift_class: DriftClass
    rho: float
    tail_rate: float = 1.0
    tail_rate_negative: float = 1.0
    flags: Dict[str, Any] = field(default_factory=dict)

    @property
    def d(self) -> np.ndarray:
        return self.epoch.d

    @property
    def t(self) -> np.ndarray:
        return self.epoch.t

    @property
    def defect(self) -> Interval:
        return self.epoch.defect

    @property
    def is_continuous(self) -> bool:
        return self.law.get("kind") in {"gaussian", "uniform_symmetric", "cauchy"}


def build_series(law: StepLaw, N: int, recurrence_horizon: Optional[int] = None) -> SpitzerSeries:
    """All exact series of a law: q to N, recurrences to recurrence_horizon (default N)."""
    if N < 1:
        raise ConfigError(f"horizon must be >= 1, got {N}")
    M = N if recurrence_horizon is None else min(recurrence_horizon, N)
    if isinstance(law, ContinuousStepLaw):
        q = np.full(N + 1, 0.5)
        q[0] = 1.0
        q_strict = np.full(N + 1, 0.5)
        q_strict[0] = 0.0
        rate = rate_neg = 1.0
    else:
        q, q_strict = exceedance_probs(law, N)
        rate = rate_neg = 1.0
        if law.drift_class is DriftClass.DRIFTS_DOWN:
            rate = chernoff_rate(law)
        elif law.drift_class is DriftClass.DRIFTS_UP:
            rate_neg = chernoff_rate(law, negate=True)

    drift = law.drift_class
    down = drift is DriftClass.DRIFTS_DOWN
    epoch = ladder_epoch_pmf(q, M, tail_rate=rate, converges=down)
    strict_epoch = ladder_epoch_pmf(q_strict, M, tail_rate=rate, converges=down)
    series = SpitzerSeries(
        law=law.describe(),
        N=N,
        q=q,
        q_strict=q_strict,
        a=spitzer_exp(q, M),
        a_strict=spitzer_exp(q_strict, M),
        epoch=epoch,
        strict_epoch=strict_epoch,
        drift_class=drift,
        rho=law.rho,
        tail_rate=rate,
        tail_rate_negative=rate_neg,
    )
    logger.info(
        "series %s N=%d drift=%s defect=%.6g", law.name, N, drift.value, series.defect.value
    )
    return series


@dataclass
class CRho:
    """C_rho(1 - 1/n) with a remainder bound on the log series."""

    value: float
    log_value: float
    remainder: float
    decaying: bool
    n: float
    rho: float
    strict: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "rho": self.rho,
            "value": self.value,
            "log_remainder": self.remainder,
            "decaying": self.decaying,
            "strict": self.strict,
        }


def c_rho(q: np.ndarray, rho: float, n: float, strict: bool = False) -> CRho:
    """exp sum_k (1 - 1/n)^k (q_k - rho)/k over the available horizon.

    Pass P(S_k > 0) with strict=True for the strong-record normalizer.
    """
    if not 0.0 <= rho <= 1.0:
        raise ConfigError(f"rho must lie in [0, 1], got {rho!r}")
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n!r}")
    q = np.asarray(q, dtype=np.float64)
    N = q.size - 1
    k = np.arange(1, N + 1, dtype=np.float64)
    x = 1.0 - 1.0 / n
    gap = q[1:] - rho
    weights = np.power(x, k)
    log_value = float(np.sum(weights * gap / k))

    late = np.abs(gap[3 * N // 4 :])
    early = np.abs(gap[N // 8 : max(N // 4, N // 8 + 1)])
    late_max = float(late.max()) if late.size else 0.0
    early_max = float(early.max()) if early.size else 0.0
    decaying = not (late_max > 1e-3 and late_max > NO_DECAY_RATIO * early_max)
    if not decaying:
        logger.warning(
            "q_k - rho shows no decay by k=%d (|q_k - rho| ~ %.3g); rho=%s is likely wrong",
            N,
            late_max,
            rho,
        )
    if x <= 0.0:
        remainder = 0.0
    else:
        remainder = late_max * math.exp((N + 1) * math.log(x)) / ((N + 1) * (1.0 - x))
    return CRho(
        value=math.exp(log_value),
        log_value=log_value,
        remainder=remainder,
        decaying=decaying,
        n=n,
        rho=rho,
        strict=strict,
    )


def series_c_rho(series: SpitzerSeries, n: float, strict: bool = False) -> CRho:
    return c_rho(series.q_strict if strict else series.q, series.rho, n, strict=strict)


@dataclass
class GeometricLaw:
    """P(X = start + j) = (1 - p)^j p with p given as an interval."""

    parameter: Interval
    start: int

    @property
    def mean(self) -> Interval:
        p = self.parameter
        return Interval(
            self.start - 1 + 1.0 / p.value,
            self.start - 1 + 1.0 / p.upper,
            self.start - 1 + 1.0 / p.lower if p.lower > 0 else math.inf,
            p.certified,
        )

    def pmf(self, k: int) -> float:
        if k < self.start:
            return 0.0
        p = self.parameter.value
        return (1.0 - p) ** (k - self.start) * p

    def to_dict(self) -> Dict[str, Any]:
        return {
            "start": self.start,
            "parameter": self.parameter.to_dict(),
            "mean": self.mean.to_dict(),
        }


def _require_drift_down(series: SpitzerSeries, what: str) -> None:
    if series.drift_class is not DriftClass.DRIFTS_DOWN:
        raise PreconditionError(
            f"{what} needs a walk drifting to -infinity; {series.law.get('kind')} "
            f"{series.drift_class.value} and sum q_k/k diverges"
        )


def r_infinity_law(series: SpitzerSeries) -> GeometricLaw:
    """R_infinity is geometric on {1, 2, ...} with parameter exp(-sum q_k/k)."""
    _require_drift_down(series, "r_infinity_law")
    return GeometricLaw(series.defect, start=1)


def m_infinity_law(series: SpitzerSeries, law: LatticeStepLaw) -> GeometricLaw:
    """M_infinity of a right-continuous walk is geometric on {0, 1, ...}.

    P(M_infinity = 0) = exp(-sum P(S_k > 0)/k). A law with no positive step
    has every such term 0 and M_infinity = 0.
    """
    if not law.upward_skip_free:
        raise PreconditionError(
            f"m_infinity_law needs steps <= +1, got support_hi = {law.support_hi}"
        )
    _require_drift_down(series, "m_infinity_law")
    return GeometricLaw(series.strict_epoch.defect, start=0)


def estimate_rho(series: SpitzerSeries) -> float:
    """Cesaro mean of q_k over the horizon."""
    return float(series.q[1:].mean())


def expected_ladder_epoch(series: SpitzerSeries) -> Interval:
    """E(T_1) = exp(sum P(S_k < 0)/k); infinite unless the walk drifts up."""
    if series.drift_class is not DriftClass.DRIFTS_UP:
        return Interval(math.inf, math.inf, math.inf)
    below = 1.0 - series.q
    below[0] = 0.0
    partial = log_series_sum(below)
    tail = _series_tail(series.tail_rate_negative, series.N)
    return Interval(
        math.exp(partial + tail / 2.0),
        math.exp(partial),
        math.exp(partial + tail),
        certified=math.isfinite(tail),
    )


def ladder_limits(series: SpitzerSeries) -> Dict[str, Interval]:
    """Limits of P(L_{n,n} = n) and P(L_{n,0} = n) for a walk drifting up."""
    if series.drift_class is not DriftClass.DRIFTS_UP:
        raise PreconditionError("ladder_limits needs a walk drifting to +infinity")
    tail = _series_tail(series.tail_rate_negative, series.N)
    out: Dict[str, Interval] = {}
    for key, probs in (("weak", series.q), ("strong", series.q_strict)):
        below = 1.0 - probs
        below[0] = 0.0
        partial = log_series_sum(below)
        out[key] = Interval(
            math.exp(-partial - tail / 2.0),
            math.exp(-partial - tail),
            math.exp(-partial),
            certified=math.isfinite(tail),
        )
    return out


def corollary_ratio(series: SpitzerSeries, n: int) -> float:
    """a_n Gamma(rho) / (n^(rho-1) C_rho(1 - 1/n)), which tends to 1."""
    if n > series.a.size - 1:
        raise ConfigError(f"a_n needs recurrence horizon >= {n}")
    rho = series.rho
    if not 0.0 < rho < 1.0:
        raise PreconditionError("corollary_ratio needs rho in (0, 1)")
    c = series_c_rho(series, n)
    log_ratio = (
        math.log(series.a[n]) + gammaln(rho) - (rho - 1.0) * math.log(n) - c.log_value
    )
    return math.exp(log_ratio)

"""
Ladder heights and the renewal function V.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..models.steps import DriftClass, StepLaw, require_lattice
from ..utils.errors import ConfigError, PreconditionError
from ..utils.logger import get_logger
from .spitzer import GeometricLaw, Interval, SpitzerSeries, check_cells, build_series

logger = get_logger(__name__)

CONTINUATION_WARN = 1e-6
RENEWAL_TERM_TOL = 1e-12
RENEWAL_MAX_TERMS = 1_000_000


@dataclass
class LadderHeightLaw:
    """z_pmf[j] = P(Z_1 = j, T_1 <= N) for j = 0..maxH.

    residual[n] is the mass not yet absorbed after n steps; continuation is
    the part of the final residual that will still reach a ladder point
    (residual minus the defect) but has no assigned height.
    """

    z_pmf: np.ndarray
    z_defect: float
    residual: np.ndarray
    continuation: float
    folded: bool = False

    @property
    def max_height(self) -> int:
        return self.z_pmf.size - 1

    @property
    def total_mass(self) -> float:
        return float(self.z_pmf.sum()) + self.z_defect + self.continuation

    def to_dict(self) -> Dict[str, Any]:
        return {
            "z_pmf": self.z_pmf.tolist(),
            "z_defect": self.z_defect,
            "continuation": self.continuation,
            "folded": self.folded,
        }


def ladder_height_pmf(
    law: StepLaw, N: int, maxH: int, series: Optional[SpitzerSeries] = None
) -> LadderHeightLaw:
    """Heights of the first weak ladder point by absorption over negative states.

    The walk lives on the strictly negative states until its first visit to
    [0, support_hi]; absorbed mass at n steps and height j is P(Z_1 = j, T_1 = n).
    The defect is taken from series (built on demand for walks drifting down).
    """
    lattice = require_lattice(law, "ladder_height_pmf")
    if N < 1:
        raise ConfigError(f"horizon must be >= 1, got {N}")
    if maxH < lattice.support_hi:
        raise ConfigError(f"maxH must be >= support_hi = {lattice.support_hi}")
    check_cells(lattice, N)

    kernel = lattice.pmf
    up = max(lattice.support_hi, 0)
    z = np.zeros(maxH + 1)
    residual = np.empty(N + 1)
    residual[0] = 1.0

    # state[i] is the mass at position offset + i, all positions < 0
    state = np.ones(1)
    offset = 0
    lost = 0.0
    for n in range(1, N + 1):
        moved = np.convolve(state, kernel)
        offset_new = offset + lattice.support_lo
        zero = -offset_new
        if zero < moved.size:
            absorbed = moved[max(zero, 0) :]
            start = max(offset_new, 0)
            z[start : start + absorbed.size] += absorbed
            moved = moved[: max(zero, 0)]
        state, offset = moved, offset_new

        # states below this level cannot reach 0 within the horizon
        floor = -(N - n) * up
        if floor > offset and state.size:
            cut = min(floor - offset, state.size)
            lost += float(state[:cut].sum())
            state = state[cut:]
            offset += cut
        residual[n] = float(state.sum()) + lost
        if state.size == 0:
            residual[n:] = lost
            break

    defect = 0.0
    drift = lattice.drift_class
    if drift is DriftClass.DRIFTS_DOWN:
        if series is None:
            series = build_series(lattice, max(N, 1000), recurrence_horizon=1)
        defect = series.defect.value

    leftover = max(residual[-1] - defect, 0.0)
    folded = False
    if lattice.is_right_continuous:
        # from a negative state the first nonnegative value is exactly 0
        z[0] += leftover
        leftover = 0.0
        folded = True
    elif leftover > CONTINUATION_WARN:
        logger.warning(
            "ladder heights of %s: continuation mass %.3g after N=%d steps",
            law.name,
            leftover,
            N,
        )
    return LadderHeightLaw(z, defect, residual, leftover, folded)


def ladder_height_spitzer(law: StepLaw, N: int, maxH: int) -> np.ndarray:
    """P(Z_1 = j) for j = 0..maxH from 1 - exp(-sum_k E(y^S_k; S_k >= 0)/k).

    An oracle independent of the absorption recursion; the k-sum is
    truncated at N.
    """
    lattice = require_lattice(law, "ladder_height_spitzer")
    if N < 1 or maxH < 0:
        raise ConfigError("need N >= 1 and maxH >= 0")
    check_cells(lattice, N)
    kernel = lattice.pmf
    up = max(lattice.support_hi, 0)
    down = max(-lattice.support_lo, 0)

    b = np.zeros(maxH + 1)
    pmf = np.ones(1)
    offset = 0
    for k in range(1, N + 1):
        pmf = np.convolve(pmf, kernel)
        offset += lattice.support_lo
        remaining = N - k
        floor = -remaining * up
        if floor > offset:
            pmf = pmf[min(floor - offset, pmf.size) :]
            offset = floor
        # higher states never come back to [0, maxH]
        ceiling = maxH + remaining * down
        if ceiling - offset + 1 < pmf.size:
            pmf = pmf[: max(ceiling - offset + 1, 0)]
        if pmf.size == 0:
            break
        lo = max(0, offset)
        hi = min(maxH, offset + pmf.size - 1)
        if lo <= hi:
            b[lo : hi + 1] += pmf[lo - offset : hi - offset + 1] / k

    # coefficients of exp(-B(y)) by the log-derivative recurrence
    e = np.zeros(maxH + 1)
    e[0] = math.exp(-b[0])
    jb = np.arange(maxH + 1) * b
    for j in range(1, maxH + 1):
        e[j] = -np.dot(jb[1 : j + 1], e[j - 1 :: -1]) / j
    z = -e
    z[0] = 1.0 - e[0]
    return z


def renewal_function(z: LadderHeightLaw, x: float) -> float:
    """V(x) = sum_n P(H_n <= x), summed until a term drops below 1e-12."""
    if x < 0:
        return 0.0
    top = int(math.floor(x))
    f = np.zeros(top + 1)
    keep = min(top, z.max_height)
    f[: keep + 1] = z.z_pmf[: keep + 1]
    if f[0] >= 1.0:
        raise PreconditionError("renewal series does not converge: P(Z_1 = 0) = 1")

    value = 1.0
    term_pmf = np.zeros(top + 1)
    term_pmf[0] = 1.0
    for _ in range(RENEWAL_MAX_TERMS):
        term_pmf = np.convolve(term_pmf, f)[: top + 1]
        term = float(term_pmf.sum())
        value += term
        if term < RENEWAL_TERM_TOL:
            return value
    raise PreconditionError(
        f"renewal series at x={x} did not reach terms below {RENEWAL_TERM_TOL}"
    )


def renewal_left_limit(z: LadderHeightLaw, x: float) -> float:
    """V(x-) = sum_n P(H_n < x) on the integer lattice, with V(0-) taken as 1."""
    if x < 0:
        return 0.0
    if x == 0:
        return 1.0
    return renewal_function(z, math.ceil(x) - 1)


def sigma_r_infinity_parameter(
    series: SpitzerSeries, z: LadderHeightLaw, sigma: float
) -> GeometricLaw:
    """R^sigma_infinity of a walk drifting down is geometric with parameter V(sigma) * defect.

    V is taken from the left, sum_n P(H_n < sigma), which agrees with V(sigma) at
    continuity points; at sigma = 0 the parameter is the defect itself.
    """
    if series.drift_class is not DriftClass.DRIFTS_DOWN:
        raise PreconditionError("sigma-record totals are finite only for walks drifting down")
    if sigma < 0:
        raise ConfigError(f"sigma must be >= 0, got {sigma}")
    v = renewal_left_limit(z, sigma)
    d = series.defect
    return GeometricLaw(
        Interval(min(v * d.value, 1.0), min(v * d.lower, 1.0), min(v * d.upper, 1.0), d.certified),
        start=1,
    )

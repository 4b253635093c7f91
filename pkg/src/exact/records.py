"""
Exact law of the record count R_n by renewal convolution of the ladder epoch.

R_n >= m exactly when the (m-1)-th ladder epoch W_{m-1} = T_1 + ... + T_{m-1}
is at most n. Convolution powers are carried as (log scale, array with max 1)
so that probabilities far below the double range, such as P(R_n = n + 1) for
large n, keep their exponent.
"""

import math
from typing import Tuple

import numpy as np
from scipy.special import logsumexp

from ..utils.errors import ConfigError
from .spitzer import LadderEpochLaw

ScaledPmf = Tuple[float, np.ndarray]


def _normalize(arr: np.ndarray, log_scale: float) -> ScaledPmf:
    top = float(arr.max()) if arr.size else 0.0
    if top <= 0.0:
        return -math.inf, np.zeros_like(arr)
    return log_scale + math.log(top), arr / top


def _scaled_convolve(x: ScaledPmf, y: ScaledPmf, n: int) -> ScaledPmf:
    if x[0] == -math.inf or y[0] == -math.inf:
        return -math.inf, np.zeros(n + 1)
    prod = np.convolve(x[1], y[1])[: n + 1]
    return _normalize(prod, x[0] + y[0])


def _log_mass(x: ScaledPmf) -> float:
    total = float(x[1].sum())
    return x[0] + math.log(total) if total > 0 and x[0] > -math.inf else -math.inf


def _check_horizon(epoch: LadderEpochLaw, n: int) -> None:
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    if epoch.N < n:
        raise ConfigError(f"ladder epoch law computed to {epoch.N}, need horizon >= {n}")


def record_count_logpmf(epoch: LadderEpochLaw, n: int) -> np.ndarray:
    """log P(R_n = m) for m = 0..n+1 (entry 0 is -inf)."""
    _check_horizon(epoch, n)
    out = np.full(n + 2, -math.inf)
    survival = epoch.survival()[: n + 1]
    # reversed so that dot(w, surv_rev) = sum_k P(W = k) P(T_1 > n - k)
    surv_rev = survival[::-1]
    step: ScaledPmf = _normalize(epoch.t[: n + 1].copy(), 0.0)

    w: ScaledPmf = (0.0, np.zeros(n + 1))
    w[1][0] = 1.0
    for m in range(1, n + 2):
        inner = float(np.dot(w[1], surv_rev))
        if inner > 0.0 and w[0] > -math.inf:
            out[m] = w[0] + math.log(inner)
        if m == n + 1:
            break
        w = _scaled_convolve(w, step, n)
        if w[0] == -math.inf:
            break
    return out


def record_count_distribution(epoch: LadderEpochLaw, n: int) -> np.ndarray:
    """P(R_n = m) for m = 0..n+1 (entry 0 is 0)."""
    return np.exp(record_count_logpmf(epoch, n))


def record_tail_logprob(epoch: LadderEpochLaw, n: int, m: int) -> float:
    """log P(R_n >= m) = log P(W_{m-1} <= n), by binary powering of T_1."""
    _check_horizon(epoch, n)
    if m <= 1:
        return 0.0
    if m > n + 1:
        return -math.inf
    power = m - 1
    base: ScaledPmf = _normalize(epoch.t[: n + 1].copy(), 0.0)
    acc: ScaledPmf = (0.0, np.zeros(n + 1))
    acc[1][0] = 1.0
    while power:
        if power & 1:
            acc = _scaled_convolve(acc, base, n)
        power >>= 1
        if power:
            base = _scaled_convolve(base, base, n)
    return min(_log_mass(acc), 0.0)


def record_count_mean(logpmf: np.ndarray) -> float:
    m = np.arange(logpmf.size)
    finite = np.isfinite(logpmf)
    if not finite.any():
        return 0.0
    return float(np.exp(logsumexp(logpmf[finite], b=m[finite])))

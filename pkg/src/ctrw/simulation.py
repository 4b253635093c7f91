"""
Continuous-time random walks: jumps of the step law at renewal epochs of the
waiting law, and the record count R~_t among jumps that have arrived by t.

R~_t = R_{N(t)} with N(t) = max{k : Y_1 + ... + Y_k <= t}; R~_0 = 1.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from ..limits.mittag_leffler import ml_moment_ratio
from ..models.steps import StepLaw, WaitingLaw
from ..models.streams import replicate_streams
from ..utils.config import get_settings, worker_count
from ..utils.errors import ConfigError
from ..utils.logger import get_logger
from ..walk.trajectory import record_count_path

logger = get_logger(__name__)

WAIT_CHUNK = 1024
MIN_HORIZON_SPAN = 10.0


@dataclass
class CTRWConfig:
    """Step law, waiting law, horizons and replicate count of one experiment."""

    step_law: StepLaw
    waiting_law: WaitingLaw
    horizons: Sequence[float]
    reps: int
    seed: int
    workers: int = 0

    def __post_init__(self):
        h = [float(t) for t in self.horizons]
        if not h:
            raise ConfigError("at least one horizon is required")
        if any(t < 0 or not math.isfinite(t) for t in h):
            raise ConfigError(f"horizons must be finite and >= 0, got {h}")
        if any(b <= a for a, b in zip(h, h[1:])):
            raise ConfigError(f"horizons must be sorted strictly ascending, got {h}")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        self.horizons = tuple(h)

    def describe(self) -> Dict[str, Any]:
        return {
            "step_law": self.step_law.describe(),
            "waiting_law": self.waiting_law.describe(),
            "horizons": list(self.horizons),
            "reps": self.reps,
            "seed": self.seed,
        }


@dataclass
class CTRWResult:
    """r_tilde[r, h] = R~ at horizons[h] for replicate r."""

    horizons: Tuple[float, ...]
    r_tilde: np.ndarray
    jumps: np.ndarray
    composed: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def reps(self) -> int:
        return self.r_tilde.shape[0]

    @property
    def composition_holds(self) -> bool:
        return bool(np.array_equal(self.r_tilde, self.composed))

    @property
    def nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.r_tilde, axis=1) >= 0))

    def at(self, t: float) -> np.ndarray:
        try:
            col = self.horizons.index(float(t))
        except ValueError:
            raise ConfigError(f"{t} is not one of the horizons {self.horizons}") from None
        return self.r_tilde[:, col]

    def to_frame(self) -> pd.DataFrame:
        reps, count = self.r_tilde.shape
        return pd.DataFrame(
            {
                "replicate": np.repeat(np.arange(reps), count),
                "t": np.tile(np.asarray(self.horizons), reps),
                "r_tilde": self.r_tilde.ravel(),
            }
        )


def renewal_count(waits: np.ndarray, horizons: Sequence[float]) -> np.ndarray:
    """N(t) = number of arrivals Y_1 + ... + Y_k <= t, for each t."""
    arrivals = np.cumsum(np.asarray(waits, dtype=np.float64))
    return np.searchsorted(arrivals, np.asarray(horizons, dtype=np.float64), side="right")


def _draw_until(waiting: WaitingLaw, stream: np.random.Generator, limit: float) -> np.ndarray:
    """Waits until their sum first exceeds limit (the last one included)."""
    chunks: List[np.ndarray] = []
    total = 0.0
    size = WAIT_CHUNK
    while total <= limit:
        chunk = waiting.sample(stream, size)
        chunks.append(chunk)
        total += float(chunk.sum())
        size *= 2
    waits = np.concatenate(chunks)
    cut = int(np.searchsorted(np.cumsum(waits), limit, side="right")) + 1
    return waits[: min(cut, waits.size)]


def simulate_replicate(
    config: CTRWConfig, index: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(R~ by arrival masking, N(t), R_{N(t)} by composition) for one replicate."""
    step_stream, wait_stream = replicate_streams(config.seed, index)
    horizons = np.asarray(config.horizons)
    waits = _draw_until(config.waiting_law, wait_stream, float(horizons[-1]))
    steps = config.step_law.sample(step_stream, waits.size)

    arrivals = np.cumsum(waits)
    path = np.cumsum(steps)
    prev_max = np.maximum.accumulate(np.concatenate(([0], path)))[:-1]
    is_record = path >= prev_max
    joint = np.array(
        [1 + int(np.count_nonzero(is_record & (arrivals <= t))) for t in horizons],
        dtype=np.int64,
    )

    jumps = renewal_count(waits, horizons)
    composed = record_count_path(steps)[jumps]
    return joint, jumps, composed


def _run_block(config: CTRWConfig, start: int, stop: int):
    rows = [simulate_replicate(config, r) for r in range(start, stop)]
    return start, np.stack([r[0] for r in rows]), np.stack([r[1] for r in rows]), np.stack(
        [r[2] for r in rows]
    )


def simulate_ctrw(config: CTRWConfig) -> CTRWResult:
    """Per-horizon samples of R~_t over config.reps replicates."""
    rep_block = int(get_settings().get("engine.replicate_block", 256))
    workers = config.workers or worker_count()
    ranges = [(s, min(s + rep_block, config.reps)) for s in range(0, config.reps, rep_block)]
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, config, a, b) for a, b in ranges]
            results = [f.result() for f in futures]
    else:
        results = [_run_block(config, a, b) for a, b in ranges]
    results.sort(key=lambda item: item[0])

    result = CTRWResult(
        horizons=tuple(config.horizons),
        r_tilde=np.concatenate([r[1] for r in results]),
        jumps=np.concatenate([r[2] for r in results]),
        composed=np.concatenate([r[3] for r in results]),
        meta=config.describe(),
    )
    if not result.composition_holds:
        logger.error("CTRW composition identity failed for %s", config.describe())
    logger.info(
        "ctrw %s/%s reps=%d horizons=%s",
        config.step_law.name,
        config.waiting_law.family.value,
        config.reps,
        list(config.horizons),
    )
    return result


def _moment_ratio(samples: np.ndarray) -> float:
    x = np.asarray(samples, dtype=np.float64)
    mean = float(x.mean())
    return float(np.mean(x * x)) / (mean * mean)


def scaling_check(
    samples_t1: Sequence[float],
    samples_t2: Sequence[float],
    alpha_rho: float,
    t1: float,
    t2: float,
) -> Dict[str, float]:
    """Mean growth against (t2/t1)^(alpha rho) and moment ratios against g_(alpha rho)."""
    if t1 <= 0 or t2 / t1 < MIN_HORIZON_SPAN:
        raise ConfigError(f"scaling_check needs t2/t1 >= {MIN_HORIZON_SPAN:g}, got {t1}, {t2}")
    if not 0.0 <= alpha_rho <= 1.0:
        raise ConfigError(f"alpha_rho must lie in [0, 1], got {alpha_rho!r}")
    a = np.asarray(samples_t1, dtype=np.float64)
    b = np.asarray(samples_t2, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ConfigError("scaling_check needs non-empty samples")
    mean_ratio = float(b.mean() / a.mean())
    mean_target = (t2 / t1) ** alpha_rho
    ratio_target = ml_moment_ratio(alpha_rho)
    ratio_t1 = _moment_ratio(a)
    ratio_t2 = _moment_ratio(b)
    return {
        "t1": float(t1),
        "t2": float(t2),
        "alpha_rho": float(alpha_rho),
        "mean_ratio": mean_ratio,
        "mean_ratio_target": mean_target,
        "mean_ratio_error": abs(mean_ratio / mean_target - 1.0),
        "moment_ratio_t1": ratio_t1,
        "moment_ratio_t2": ratio_t2,
        "moment_ratio_target": ratio_target,
        "moment_ratio_error_t1": abs(ratio_t1 / ratio_target - 1.0),
        "moment_ratio_error_t2": abs(ratio_t2 / ratio_target - 1.0),
    }

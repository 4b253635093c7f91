"""
Replicated walks.

Replicates are processed in blocks of consecutive indices; replicate r always
draws from stream index r, so a summary depends only on (law, n, seed) and
not on block size or worker count.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..exact.spitzer import chernoff_rate
from ..models.steps import DriftClass, LatticeStepLaw, StepLaw, require_lattice
from ..models.streams import replicate_streams
from ..utils.config import get_settings, worker_count
from ..utils.errors import ConfigError, PreconditionError
from ..utils.logger import get_logger
from .trajectory import run_tracker

logger = get_logger(__name__)

R_INFINITY_TAIL_TARGET = 1e-4


@dataclass
class EmpiricalSummary:
    """Per-replicate values of the collected statistics."""

    law: Dict[str, Any]
    n: int
    seed: int
    index: np.ndarray
    values: Dict[str, np.ndarray]
    checkpoints: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    checkpoint_counts: Optional[np.ndarray] = None

    @property
    def reps(self) -> int:
        return int(self.index.size)

    def merge(self, other: "EmpiricalSummary") -> "EmpiricalSummary":
        """Union of two disjoint replicate sets, ordered by replicate index."""
        if (self.n, self.seed) != (other.n, other.seed) or set(self.values) != set(
            other.values
        ):
            raise ConfigError("cannot merge summaries of different experiments")
        index = np.concatenate([self.index, other.index])
        if np.unique(index).size != index.size:
            raise ConfigError("summaries share replicate indices")
        order = np.argsort(index, kind="stable")
        values = {
            k: np.concatenate([self.values[k], other.values[k]])[order]
            for k in self.values
        }
        counts = None
        if self.checkpoint_counts is not None and other.checkpoint_counts is not None:
            counts = np.concatenate([self.checkpoint_counts, other.checkpoint_counts])[
                order
            ]
        return EmpiricalSummary(
            self.law, self.n, self.seed, index[order], values, self.checkpoints, counts
        )

    def column(self, stat: str) -> np.ndarray:
        if stat not in self.values:
            raise ConfigError(
                f"statistic {stat!r} was not collected; have {sorted(self.values)}"
            )
        return self.values[stat]

    def moments(self, stat: str, scale: float = 1.0) -> Dict[str, float]:
        """Mean, second moment and the normalization-free moment ratio of stat/scale."""
        x = self.column(stat).astype(np.float64) / scale
        mean = float(x.mean())
        second = float(np.mean(x * x))
        var = float(x.var(ddof=1)) if x.size > 1 else 0.0
        return {
            "mean": mean,
            "second_moment": second,
            "variance": var,
            "sem": math.sqrt(var / x.size),
            "moment_ratio": second / (mean * mean) if mean else float("nan"),
            "min": float(x.min()),
            "max": float(x.max()),
        }

    def histogram(self, stat: str) -> Dict[int, int]:
        values, counts = np.unique(self.column(stat), return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"replicate": self.index})
        for key in sorted(self.values):
            frame[key] = self.values[key]
        return frame

    def to_json_dict(self) -> Dict[str, Any]:
        stats: Dict[str, Any] = {}
        for key in sorted(self.values):
            entry: Dict[str, Any] = {"moments": self.moments(key)}
            if np.issubdtype(self.values[key].dtype, np.integer):
                entry["histogram"] = {str(k): v for k, v in self.histogram(key).items()}
            stats[key] = entry
        return {
            "law": self.law,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "statistics": stats,
        }


def _run_block(
    law: StepLaw,
    n: int,
    seed: int,
    start: int,
    stop: int,
    sigmas: Tuple[float, ...],
    threshold: Optional[Tuple[float, float]],
    checkpoints: Tuple[int, ...],
    block_size: int,
) -> Tuple[int, Dict[str, np.ndarray], np.ndarray]:
    streams = [replicate_streams(seed, r)[0] for r in range(start, stop)]
    tracker = run_tracker(
        law,
        n,
        streams,
        sigmas=sigmas,
        threshold=threshold,
        checkpoints=checkpoints,
        block_size=block_size,
    )
    return start, tracker.columns(), tracker.checkpoint_counts


def monte_carlo(
    law: StepLaw,
    n: int,
    reps: int,
    seed: int,
    collect: Optional[Sequence[str]] = None,
    sigmas: Sequence[float] = (),
    threshold: Optional[Tuple[float, float]] = None,
    checkpoints: Sequence[int] = (),
    workers: Optional[int] = None,
) -> EmpiricalSummary:
    """Simulate reps independent walks of n steps.

    collect names the statistics to keep (default: all tracker columns).
    """
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    if n < 0:
        raise ConfigError(f"step count must be >= 0, got {n}")
    settings = get_settings()
    rep_block = int(settings.get("engine.replicate_block", 256))
    block_size = int(settings.get("engine.block_size", 65536))
    workers = worker_count() if workers is None else workers

    ranges = [(s, min(s + rep_block, reps)) for s in range(0, reps, rep_block)]
    args = (tuple(float(s) for s in sigmas), threshold, tuple(int(c) for c in checkpoints))

    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_block, law, n, seed, a, b, *args, block_size)
                for a, b in ranges
            ]
            results = [f.result() for f in futures]
    else:
        results = [_run_block(law, n, seed, a, b, *args, block_size) for a, b in ranges]
    results.sort(key=lambda item: item[0])

    columns = results[0][1].keys()
    values = {k: np.concatenate([res[1][k] for res in results]) for k in columns}
    if collect is not None:
        missing = [c for c in collect if c not in values]
        if missing:
            raise ConfigError(f"unknown statistics {missing}; choose from {sorted(values)}")
        values = {k: values[k] for k in collect}
    counts = np.concatenate([res[2] for res in results]) if checkpoints else None

    logger.info(
        "monte carlo %s n=%d reps=%d workers=%d", law.name, n, reps, max(workers, 1)
    )
    return EmpiricalSummary(
        law=law.describe(),
        n=n,
        seed=seed,
        index=np.arange(reps),
        values=values,
        checkpoints=np.array(sorted(set(checkpoints)), dtype=np.int64),
        checkpoint_counts=counts,
    )


@dataclass
class RInfinityEstimate:
    """Empirical law of the total record count of a walk drifting down."""

    cap: int
    tail_bound: float
    certified: bool
    summary: EmpiricalSummary

    def histogram(self) -> Dict[int, int]:
        return self.summary.histogram("r_weak")

    def pmf(self, stat: str = "r_weak") -> Dict[int, float]:
        reps = self.summary.reps
        return {k: c / reps for k, c in self.summary.histogram(stat).items()}

    def mean(self) -> float:
        return float(self.summary.column("r_weak").mean())


def record_tail_bound(law: LatticeStepLaw, cap: int) -> float:
    """Bound on P(some weak record after step cap) from the Chernoff rate."""
    r = chernoff_rate(law)
    if r >= 1.0:
        return 1.0
    if r == 0.0:
        return 0.0
    return math.exp((cap + 1) * math.log(r)) / (1.0 - r)


def certified_cap(law: LatticeStepLaw, target: float = R_INFINITY_TAIL_TARGET) -> int:
    """Smallest cap whose record tail bound is below target."""
    r = chernoff_rate(law)
    if r >= 1.0:
        raise PreconditionError(f"{law.name} does not drift down; R_infinity is infinite")
    if r == 0.0:
        return 1
    cap = math.ceil(math.log(target * (1.0 - r)) / math.log(r)) - 1
    return max(cap, 1)


def empirical_r_infinity(
    law: StepLaw,
    reps: int,
    seed: int,
    cap: Optional[int] = None,
    workers: Optional[int] = None,
) -> RInfinityEstimate:
    """Histogram of R_infinity from walks truncated at cap steps."""
    lattice = require_lattice(law, "empirical_r_infinity")
    if lattice.drift_class is not DriftClass.DRIFTS_DOWN:
        raise PreconditionError(
            f"{law.name} does not drift to -infinity; R_infinity is not finite"
        )
    if cap is None:
        cap = certified_cap(lattice)
    bound = record_tail_bound(lattice, cap)
    certified = bound < R_INFINITY_TAIL_TARGET
    if not certified:
        logger.warning(
            "R_infinity truncation at cap=%d not certified: tail bound %.3g >= %.0e",
            cap,
            bound,
            R_INFINITY_TAIL_TARGET,
        )
    summary = monte_carlo(
        lattice,
        cap,
        reps,
        seed,
        collect=["r_weak", "r_strong", "max_val"],
        workers=workers,
    )
    return RInfinityEstimate(cap=cap, tail_bound=bound, certified=certified, summary=summary)


def replicate_values(summary: EmpiricalSummary, stats: List[str]) -> pd.DataFrame:
    """Selected columns with the replicate index, for CSV output."""
    frame = summary.to_frame()
    return frame[["replicate"] + stats]

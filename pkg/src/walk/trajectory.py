"""
Streaming record statistics for discrete-time walks.

RecordTracker consumes steps in column blocks for a batch of independent
paths (one row per path) and keeps O(1) state per path and counter. Lattice
laws are tracked in exact int64 arithmetic, continuous laws in float64 with
plain comparisons.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..models.steps import LatticeStepLaw, StepLaw
from ..models.streams import replicate_streams
from ..utils.config import get_settings
from ..utils.errors import ConfigError
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class TrajectoryStats:
    """Record counters of a single path after n steps."""

    n: int
    r_weak: int
    r_strong: int
    r_sigma: Dict[float, int]
    max_val: float
    n_nonneg: int
    n_pos: int
    last_max_pos: int
    first_max_pos: int
    ladder_epochs: List[int] = field(default_factory=list)
    ladder_heights: List[float] = field(default_factory=list)
    r_thresholded: Optional[int] = None
    final_value: float = 0.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "r_weak": self.r_weak,
            "r_strong": self.r_strong,
            "r_sigma": {str(k): v for k, v in self.r_sigma.items()},
            "max_val": self.max_val,
            "n_nonneg": self.n_nonneg,
            "n_pos": self.n_pos,
            "last_max_pos": self.last_max_pos,
            "first_max_pos": self.first_max_pos,
            "ladder_epochs": list(self.ladder_epochs),
            "ladder_heights": list(self.ladder_heights),
            "r_thresholded": self.r_thresholded,
            "final_value": self.final_value,
        }


def _normalize_sigmas(sigmas: Sequence[float]) -> Tuple[float, ...]:
    out = []
    for s in sigmas:
        s = float(s)
        if not s >= 0.0:
            raise ConfigError(f"sigma thresholds must be >= 0, got {s!r}")
        if s not in out:
            out.append(s)
    return tuple(out)


class RecordTracker:
    """Record counters for `rows` paths, fed block by block."""

    def __init__(
        self,
        rows: int = 1,
        sigmas: Sequence[float] = (),
        threshold: Optional[Tuple[float, float]] = None,
        integer: bool = True,
        collect_ladder: bool = False,
        checkpoints: Optional[Sequence[int]] = None,
    ):
        if rows < 1:
            raise ConfigError("tracker needs at least one row")
        self.rows = rows
        self.sigmas = _normalize_sigmas(sigmas)
        self.threshold = threshold
        self.integer = integer
        self.collect_ladder = collect_ladder

        dtype = np.int64 if integer else np.float64
        self.t = 0
        self.s = np.zeros(rows, dtype=dtype)
        self.m = np.zeros(rows, dtype=dtype)
        self.r_weak = np.ones(rows, dtype=np.int64)
        self.r_strong = np.ones(rows, dtype=np.int64)
        self.n_nonneg = np.zeros(rows, dtype=np.int64)
        self.n_pos = np.zeros(rows, dtype=np.int64)
        self.last_max_pos = np.zeros(rows, dtype=np.int64)
        self.first_max_pos = np.zeros(rows, dtype=np.int64)

        # chains with sigma == 0 are read off r_weak
        self._chain = np.array([s for s in self.sigmas if s > 0.0], dtype=np.float64)
        self.sigma_value = np.zeros((rows, len(self._chain)))
        self.sigma_count = np.ones((rows, len(self._chain)), dtype=np.int64)

        self.r_thresholded: Optional[np.ndarray] = None
        if threshold is not None:
            x1, x2 = threshold
            self._level = float(x2) - float(x1)
            self.r_thresholded = np.full(rows, 1 if x1 >= x2 else 0, dtype=np.int64)

        self.ladder_epochs: List[List[int]] = [[] for _ in range(rows)]
        self.ladder_heights: List[List[float]] = [[] for _ in range(rows)]

        self.checkpoints = np.array(sorted(set(checkpoints or ())), dtype=np.int64)
        if self.checkpoints.size and self.checkpoints[0] < 0:
            raise ConfigError("checkpoints must be non-negative step indices")
        self.checkpoint_counts = np.ones((rows, self.checkpoints.size), dtype=np.int64)

    def update(self, steps: np.ndarray) -> None:
        """Consume the next block of steps, shape (rows, B) or (B,) for one row."""
        x = np.asarray(steps)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[0] != self.rows:
            raise ConfigError(f"expected {self.rows} rows of steps, got {x.shape[0]}")
        width = x.shape[1]
        if width == 0:
            return
        x = x.astype(self.s.dtype, copy=False)

        path = self.s[:, None] + np.cumsum(x, axis=1)
        running = np.maximum.accumulate(
            np.concatenate([self.m[:, None], path], axis=1), axis=1
        )
        prev_max = running[:, :-1]
        weak = path >= prev_max
        strong = path > prev_max
        positions = self.t + 1 + np.arange(width)

        if self.checkpoints.size:
            self._record_checkpoints(weak, width)
        if self.collect_ladder:
            self._collect_ladder(path, weak, positions)
        if self._chain.size:
            self._advance_sigma_chains(path, weak)

        self.r_weak += weak.sum(axis=1)
        self.r_strong += strong.sum(axis=1)
        self.n_nonneg += (path >= 0).sum(axis=1)
        self.n_pos += (path > 0).sum(axis=1)

        any_weak = weak.any(axis=1)
        last_weak = width - 1 - np.argmax(weak[:, ::-1], axis=1)
        self.last_max_pos = np.where(any_weak, positions[last_weak], self.last_max_pos)
        any_strong = strong.any(axis=1)
        last_strong = width - 1 - np.argmax(strong[:, ::-1], axis=1)
        self.first_max_pos = np.where(
            any_strong, positions[last_strong], self.first_max_pos
        )

        if self.r_thresholded is not None:
            self.r_thresholded += (weak & (path >= self._level)).sum(axis=1)

        self.s = path[:, -1].copy()
        self.m = running[:, -1].copy()
        self.t += width

    def _record_checkpoints(self, weak: np.ndarray, width: int) -> None:
        inside = (self.checkpoints > self.t) & (self.checkpoints <= self.t + width)
        ahead = self.checkpoints > self.t + width
        if not (inside.any() or ahead.any()):
            return
        running_count = self.r_weak[:, None] + np.cumsum(weak, axis=1)
        if inside.any():
            cols = self.checkpoints[inside] - self.t - 1
            self.checkpoint_counts[:, inside] = running_count[:, cols]
        # checkpoints past this block carry the running total for now
        self.checkpoint_counts[:, ahead] = running_count[:, -1:]

    def _collect_ladder(
        self, path: np.ndarray, weak: np.ndarray, positions: np.ndarray
    ) -> None:
        for r in range(self.rows):
            idx = np.flatnonzero(weak[r])
            if idx.size == 0:
                continue
            epochs = np.diff(np.concatenate(([self.last_max_pos[r]], positions[idx])))
            heights = np.diff(np.concatenate(([self.m[r]], path[r, idx])))
            self.ladder_epochs[r].extend(int(e) for e in epochs)
            self.ladder_heights[r].extend(heights.tolist())

    def _advance_sigma_chains(self, path: np.ndarray, weak: np.ndarray) -> None:
        # every sigma-record (sigma > 0) is a weak record, so chains only
        # need to look at weak-record values, which are nondecreasing
        if int(weak.sum()) <= path.shape[1]:
            for r in range(self.rows):
                idx = np.flatnonzero(weak[r])
                if idx.size == 0:
                    continue
                values = path[r, idx]
                for k, sigma in enumerate(self._chain):
                    level = self.sigma_value[r, k] + sigma
                    j = int(np.searchsorted(values, level, side="left"))
                    while j < values.size:
                        self.sigma_value[r, k] = values[j]
                        self.sigma_count[r, k] += 1
                        level = values[j] + sigma
                        j = int(np.searchsorted(values, level, side="left"))
            return
        for j in range(path.shape[1]):
            column = path[:, j, None]
            hit = column >= self.sigma_value + self._chain
            self.sigma_value = np.where(hit, column, self.sigma_value)
            self.sigma_count += hit

    def sigma_counts(self) -> Dict[float, np.ndarray]:
        out: Dict[float, np.ndarray] = {}
        chain = list(self._chain)
        for s in self.sigmas:
            out[s] = self.r_weak.copy() if s == 0.0 else self.sigma_count[:, chain.index(s)]
        return out

    def stats(self, row: int = 0) -> TrajectoryStats:
        sigma = {s: int(c[row]) for s, c in self.sigma_counts().items()}
        scalar = int if self.integer else float
        return TrajectoryStats(
            n=self.t,
            r_weak=int(self.r_weak[row]),
            r_strong=int(self.r_strong[row]),
            r_sigma=sigma,
            max_val=scalar(self.m[row]),
            n_nonneg=int(self.n_nonneg[row]),
            n_pos=int(self.n_pos[row]),
            last_max_pos=int(self.last_max_pos[row]),
            first_max_pos=int(self.first_max_pos[row]),
            ladder_epochs=list(self.ladder_epochs[row]),
            ladder_heights=[scalar(h) for h in self.ladder_heights[row]],
            r_thresholded=(
                None if self.r_thresholded is None else int(self.r_thresholded[row])
            ),
            final_value=scalar(self.s[row]),
        )

    def columns(self) -> Dict[str, np.ndarray]:
        """Per-row counters keyed by statistic name."""
        cols: Dict[str, np.ndarray] = {
            "r_weak": self.r_weak.copy(),
            "r_strong": self.r_strong.copy(),
            "max_val": self.m.copy(),
            "n_nonneg": self.n_nonneg.copy(),
            "n_pos": self.n_pos.copy(),
            "last_max_pos": self.last_max_pos.copy(),
            "first_max_pos": self.first_max_pos.copy(),
            "final_value": self.s.copy(),
        }
        for s, counts in self.sigma_counts().items():
            cols[f"r_sigma[{s:g}]"] = counts.copy()
        if self.r_thresholded is not None:
            cols["r_thresholded"] = self.r_thresholded.copy()
        return cols


def _block_size() -> int:
    return int(get_settings().get("engine.block_size", 65536))


def draw_steps(
    law: StepLaw, streams: Sequence[np.random.Generator], width: int
) -> np.ndarray:
    """One block of steps, row r drawn from streams[r]."""
    return np.stack([law.sample(stream, width) for stream in streams])


def walk_stats_from_steps(
    steps: Sequence[float],
    sigmas: Sequence[float] = (),
    threshold: Optional[Tuple[float, float]] = None,
) -> TrajectoryStats:
    """Record statistics of the path with the given increments."""
    arr = np.asarray(steps)
    integer = arr.size == 0 or np.issubdtype(arr.dtype, np.integer)
    tracker = RecordTracker(
        1, sigmas=sigmas, threshold=threshold, integer=integer, collect_ladder=True
    )
    tracker.update(arr.reshape(1, -1))
    return tracker.stats()


def run_tracker(
    law: StepLaw,
    n: int,
    streams: Sequence[np.random.Generator],
    sigmas: Sequence[float] = (),
    threshold: Optional[Tuple[float, float]] = None,
    collect_ladder: bool = False,
    checkpoints: Optional[Sequence[int]] = None,
    block_size: Optional[int] = None,
) -> RecordTracker:
    """Drive a tracker over n steps for len(streams) paths."""
    if n < 0:
        raise ConfigError(f"step count must be >= 0, got {n}")
    tracker = RecordTracker(
        len(streams),
        sigmas=sigmas,
        threshold=threshold,
        integer=isinstance(law, LatticeStepLaw),
        collect_ladder=collect_ladder,
        checkpoints=checkpoints,
    )
    block = block_size or _block_size()
    done = 0
    while done < n:
        width = min(block, n - done)
        tracker.update(draw_steps(law, streams, width))
        done += width
    return tracker


def run_walk(
    law: StepLaw,
    n: int,
    sigmas: Sequence[float] = (),
    threshold: Optional[Tuple[float, float]] = None,
    stream: Optional[np.random.Generator] = None,
    seed: int = 0,
    index: int = 0,
    collect_ladder: bool = True,
) -> TrajectoryStats:
    """Simulate one path of n steps and return its record statistics.

    Without an explicit stream the steps come from replicate stream `index`
    of `seed`.
    """
    if stream is None:
        stream, _ = replicate_streams(seed, index)
    tracker = run_tracker(
        law, n, [stream], sigmas=sigmas, threshold=threshold, collect_ladder=collect_ladder
    )
    stats = tracker.stats()
    logger.debug("walk %s n=%d r_weak=%d", law.name, n, stats.r_weak)
    return stats


def record_count_path(steps: np.ndarray) -> np.ndarray:
    """R_k for k = 0..len(steps) along a single path."""
    x = np.asarray(steps)
    path = np.cumsum(x)
    prev_max = np.maximum.accumulate(np.concatenate(([0], path)))[:-1]
    return np.concatenate(([1], 1 + np.cumsum(path >= prev_max)))

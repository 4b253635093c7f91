"""
Brute-force path enumeration: the small-n oracle for every exact formula.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Union

import numpy as np

from ..models.steps import StepLaw, require_lattice
from ..utils.config import get_settings
from ..utils.errors import ConfigError, PreconditionError
from ..walk.trajectory import RecordTracker

MAX_ENUMERATION_STEPS = 16
CHUNK_PATHS = 1 << 18

Statistic = Union[str, Callable[[Dict[str, np.ndarray], int], np.ndarray]]

# derived statistics used by the identity checks
DERIVED: Dict[str, Callable[[Dict[str, np.ndarray], int], np.ndarray]] = {
    "last_max_at_end": lambda cols, n: (cols["last_max_pos"] == n).astype(np.int64),
    "first_max_at_end": lambda cols, n: (cols["first_max_pos"] == n).astype(np.int64),
    "all_nonneg": lambda cols, n: (cols["n_nonneg"] == n).astype(np.int64),
    "all_positive": lambda cols, n: (cols["n_pos"] == n).astype(np.int64),
}


@dataclass
class EnumerationResult:
    """Exact pmf of a statistic over all paths of length n."""

    n: int
    paths: int
    pmf: Dict[float, float]

    def prob(self, value: float) -> float:
        return self.pmf.get(value, 0.0)

    @property
    def mean(self) -> float:
        return float(sum(v * p for v, p in self.pmf.items()))

    def as_array(self, size: int) -> np.ndarray:
        """pmf on 0..size-1 for integer-valued statistics."""
        out = np.zeros(size)
        for v, p in self.pmf.items():
            out[int(v)] += p
        return out


def _evaluate(statistic: Statistic, cols: Dict[str, np.ndarray], n: int) -> np.ndarray:
    if callable(statistic):
        return np.asarray(statistic(cols, n))
    if statistic in DERIVED:
        return DERIVED[statistic](cols, n)
    if statistic not in cols:
        raise ConfigError(
            f"unknown statistic {statistic!r}; choose from "
            f"{sorted(set(cols) | set(DERIVED))}"
        )
    return cols[statistic]


def brute_force_enumerate(
    law: StepLaw,
    n: int,
    statistic: Statistic = "r_weak",
    sigmas=(),
    threshold=None,
    cap: Optional[float] = None,
) -> EnumerationResult:
    """Weighted enumeration of all support^n paths (positive-mass support only)."""
    lattice = require_lattice(law, "brute_force_enumerate")
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    if n > MAX_ENUMERATION_STEPS:
        raise PreconditionError(f"enumeration is limited to n <= {MAX_ENUMERATION_STEPS}")
    values, probs = lattice.positive_support()
    size = values.size
    total = size**n
    limit = cap if cap is not None else float(get_settings().get("engine.enumeration_cap", 1e8))
    if total > limit:
        raise PreconditionError(
            f"{size}^{n} = {total} paths exceeds the enumeration cap {limit:.0e}"
        )

    weights: Dict[float, float] = {}
    for start in range(0, total, CHUNK_PATHS):
        index = np.arange(start, min(start + CHUNK_PATHS, total), dtype=np.int64)
        digits = (index[:, None] // size ** np.arange(n, dtype=np.int64)) % size
        tracker = RecordTracker(index.size, sigmas=sigmas, threshold=threshold)
        if n:
            tracker.update(values[digits])
            weight = np.prod(probs[digits], axis=1)
        else:
            weight = np.ones(index.size)
        stat = _evaluate(statistic, tracker.columns(), n)
        uniq, inverse = np.unique(stat, return_inverse=True)
        sums = np.bincount(inverse.ravel(), weights=weight, minlength=uniq.size)
        for v, w in zip(uniq.tolist(), sums.tolist()):
            weights[v] = weights.get(v, 0.0) + w
    return EnumerationResult(n=n, paths=total, pmf=dict(sorted(weights.items())))

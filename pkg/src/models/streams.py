"""
Counter-based random streams.

A stream is a numpy Generator over the Philox4x32 counter-based bit generator,
keyed by (seed, stream index, sub-index...). Replicate r always uses stream
index r, so results do not depend on how replicates are spread over workers.
"""

from typing import Tuple

import numpy as np

from ..utils.errors import ConfigError

STEP_SUBSTREAM = 0
WAIT_SUBSTREAM = 1


def make_stream(seed: int, index: int, *sub: int) -> np.random.Generator:
    """Independent generator for (seed, index, *sub)."""
    if seed < 0 or index < 0 or any(s < 0 for s in sub):
        raise ConfigError(
            f"seed and stream indices must be non-negative, got {(seed, index, *sub)}"
        )
    key: Tuple[int, ...] = (int(index),) + tuple(int(s) for s in sub)
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(sequence))


def replicate_streams(
    seed: int, index: int
) -> Tuple[np.random.Generator, np.random.Generator]:
    """Step and waiting-time streams of one replicate; independent of each other."""
    return (
        make_stream(seed, index, STEP_SUBSTREAM),
        make_stream(seed, index, WAIT_SUBSTREAM),
    )

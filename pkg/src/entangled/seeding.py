"""Counter-based random streams.

Every stochastic routine takes an integer seed and builds a Philox generator
from it. Philox is counter-based, so streams for distinct seeds are
independent and the bit stream is identical on every platform numpy supports.
Child seeds are derived by hashing a tuple of non-negative integers through
``SeedSequence``; a trial is reproducible from ``(master, *keys)`` alone.
"""

from __future__ import annotations

import numpy as np

SEED_BITS = 64


def make_rng(seed: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(seed))


def derive_seed(master: int, *keys: int) -> int:
    """Hash ``(master, *keys)`` into a fresh 64-bit seed."""
    entropy = [int(master), *(int(k) for k in keys)]
    if any(v < 0 for v in entropy):
        raise ValueError(f"seed components must be non-negative: {entropy}")
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])

"""Seed discipline.

One 64-bit root seed per experiment, split deterministically into independent
streams keyed by integers (run index, iteration, channel). Every stochastic
code path receives an explicit generator derived here, so traces are
bit-reproducible and independent of worker scheduling.
"""

from __future__ import annotations

import numpy as np


def spawn(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by ``(seed, *key)``.

    Streams with distinct keys are statistically independent; the same
    (seed, key) pair always yields the same stream.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))

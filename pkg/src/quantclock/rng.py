"""Seeded, splittable random streams.

All Monte Carlo entry points take an explicit ``numpy.random.Generator``.
Parallel or chunked work derives one child stream per unit of work from a
master seed by counter-mode spawning, so results do not depend on how the
work is scheduled.
"""

from __future__ import annotations

import numpy as np

__all__ = ["master", "substream", "substreams"]


def master(seed: int) -> np.random.Generator:
    """Master stream for a 64-bit unsigned seed."""
    return np.random.default_rng(np.random.SeedSequence(seed))


def substream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic child stream identified by an integer key path."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def substreams(seed: int, n: int, *prefix: int) -> list[np.random.Generator]:
    """``n`` independent child streams under a common key prefix."""
    return [substream(seed, *prefix, i) for i in range(n)]

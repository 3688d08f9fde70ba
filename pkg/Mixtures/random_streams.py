"""Seed splitting for reproducible parallel sampling.

A stream is identified by the master seed plus an integer key path, e.g.
``stream(seed, 3)`` for tail chunk 3 or ``stream(seed, n, replicate)`` for one
experiment job. Keys are counters, so the draws a piece of work sees do not
depend on how many workers share the load.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for ``key`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def derived_seed(seed: int, *key: int) -> int:
    """Integer seed of the stream ``key``; recorded in result files."""
    state = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)).generate_state(1, dtype=np.uint32)
    return int(state[0])


def seed_from(rng: np.random.Generator) -> int:
    """Draw a master seed from an existing generator."""
    return int(rng.integers(0, 2**63 - 1))


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


__all__ = ["stream", "derived_seed", "seed_from", "as_generator"]

"""Deterministic random-stream derivation.

One 64-bit master seed is the only entropy source anywhere in the package.
Independent substreams are derived from it with ``SeedSequence`` spawn keys,
so any quantity is a pure function of (seed, substream key): results cannot
depend on evaluation order, caching, or worker count.
"""

from __future__ import annotations

import os

import numpy as np

DEFAULT_SEED = 1729
SEED_ENV_VAR = "POOL_DESIGN_SEED"

# substream namespaces; first element of every spawn key
NS_SENSITIVITY = 1   # per-(n, k) pooled-sensitivity cells
NS_REPLICATE = 2     # per-replicate prior draws
NS_SIMULATION = 3    # per-chunk count simulation
NS_GENERIC = 4


def make_rng(seed: int) -> np.random.Generator:
    """Root generator for a master seed."""
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for substream ``key`` of ``seed``; stable across platforms."""
    spawn = tuple(int(k) for k in key)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=spawn))


def default_seed() -> int:
    """DEFAULT_SEED, unless overridden by the environment."""
    raw = os.environ.get(SEED_ENV_VAR, "").strip()
    return int(raw) if raw else DEFAULT_SEED

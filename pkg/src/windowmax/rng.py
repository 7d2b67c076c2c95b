"""Counter-based random number streams with deterministic splitting.

Every simulation consumer derives its generator from a 64-bit user seed, a
trial index, and a purpose tag via a SplitMix64-style hash:

    child key = mix(mix(mix(seed) ^ trial) ^ purpose)

The child key seeds a Philox 4x64 counter-based generator, so streams for
different (seed, trial, purpose) triples are statistically independent and
reproducible across platforms and thread counts.  In particular the
window-length draws and the increment draws of one trial come from
different purposes and are therefore independent streams.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PURPOSE_INCREMENTS",
    "PURPOSE_WINDOWS",
    "PURPOSE_EDGES",
    "PURPOSE_WEIGHTS",
    "PURPOSE_START_VECTOR",
    "PURPOSE_SAMPLE",
    "child_seed",
    "generator",
]

_MASK64 = (1 << 64) - 1

# purpose tags; arbitrary distinct odd constants
PURPOSE_INCREMENTS = 0x9E3779B97F4A7C15
PURPOSE_WINDOWS = 0xC2B2AE3D27D4EB4F
PURPOSE_EDGES = 0x165667B19E3779F9
PURPOSE_WEIGHTS = 0xD6E8FEB86659FD93
PURPOSE_START_VECTOR = 0xA0761D6478BD642F
PURPOSE_SAMPLE = 0xE7037ED1A0B428DB


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def child_seed(seed: int, trial: int, purpose: int) -> int:
    """Derive the 64-bit child key for one (seed, trial, purpose) stream."""
    x = _splitmix64(seed & _MASK64)
    x = _splitmix64(x ^ (trial & _MASK64))
    x = _splitmix64(x ^ (purpose & _MASK64))
    return x


def generator(seed: int, trial: int, purpose: int) -> np.random.Generator:
    """Philox generator for the (seed, trial, purpose) stream."""
    return np.random.Generator(np.random.Philox(key=child_seed(seed, trial, purpose)))

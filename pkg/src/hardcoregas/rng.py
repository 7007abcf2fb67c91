"""Deterministic seeding and reproducible random streams.

Every randomized routine in this package takes an explicit
``numpy.random.Generator``.  Independent streams (per trial, per grid
point, per worker) are derived from a single 64-bit base seed with
``mix64``, a splitmix64-style hash over the seed and the stream path.
The same (seed, path) always yields the same stream, regardless of how
many threads run or in which order work completes.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _avalanche(z: int) -> int:
    """splitmix64 finalizer: full-avalanche mix of a 64-bit word."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Hash any sequence of integers into one 64-bit value.

    Folds the parts left to right through the splitmix64 finalizer, so
    ``mix64(a, b) != mix64(b, a)`` in general and nearby inputs land far
    apart.  Negative integers are reduced modulo 2**64.
    """
    h = 0
    for p in parts:
        h = _avalanche(h ^ ((p + _GOLDEN) & _MASK64))
    return h


def generator(seed: int, *path: int) -> np.random.Generator:
    """A PCG64 generator for stream ``path`` derived from ``seed``.

    ``generator(s)`` seeds directly with ``s``; ``generator(s, i, j)``
    seeds with ``mix64(s, i, j)``.
    """
    if path:
        return np.random.default_rng(mix64(seed, *path))
    return np.random.default_rng(seed & _MASK64)

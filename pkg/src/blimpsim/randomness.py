"""Deterministic, platform-independent random streams.

Uniform variates come from the stdlib Mersenne Twister (``random.Random``):
CPython guarantees that ``random()`` yields the same sequence for the same
seed across versions and platforms, which is exactly the contract replayable
logs need. Normal variates are produced here by a fixed Box-Muller transform
(cosine branch, two uniforms per variate, no cached spare) instead of
``Random.gauss``, whose algorithm is not covered by that guarantee.
"""

from __future__ import annotations

import math
import random

_TWO_PI = 2.0 * math.pi


class DeterministicRng:
    """Seedable generator with a pinned uniform and normal stream."""

    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self.seed = int(seed)
        self._uniform = random.Random(self.seed).random

    def uniform(self) -> float:
        """Next uniform variate in [0, 1)."""
        return self._uniform()

    def normal(self) -> float:
        """Next standard normal variate; consumes exactly two uniforms."""
        u1 = 1.0 - self._uniform()  # (0, 1]: keeps log() finite
        u2 = self._uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)

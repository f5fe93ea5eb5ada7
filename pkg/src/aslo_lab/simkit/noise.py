"""Seeded Gaussian noise with a platform-independent generator.

The generator is pinned down to the bit so that identical seeds produce
identical sample streams on every platform:

* state update: xorshift64* -- x ^= x >> 12; x ^= x << 25; x ^= x >> 27;
  output = x * 0x2545F4914F6CDD1D (all mod 2^64);
* the 64-bit seed is first diffused through one splitmix64 round so that
  small seeds (including 0) still yield a well-mixed nonzero state;
* uniforms take the top 53 bits, mapped to (0, 1];
* normals via the Box-Muller transform, cos branch first, sin branch
  cached and returned on the next call.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class NoiseSource:
    """Deterministic stream of N(0, sigma^2) samples."""

    def __init__(self, seed: int, sigma: float):
        if sigma < 0.0:
            raise ValueError("sigma must be non-negative")
        self.seed = seed & _MASK
        self.sigma = float(sigma)
        self._state = _splitmix64(self.seed)
        if self._state == 0:
            self._state = 0x9E3779B97F4A7C15
        self._cached: float | None = None

    def _next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self) -> float:
        """Uniform draw in (0, 1]."""
        return ((self._next_u64() >> 11) + 1) * 2.0 ** -53

    def normal(self) -> float:
        """One N(0, sigma^2) draw."""
        if self._cached is not None:
            z = self._cached
            self._cached = None
            return self.sigma * z
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        a = 2.0 * math.pi * u2
        self._cached = r * math.sin(a)
        return self.sigma * (r * math.cos(a))

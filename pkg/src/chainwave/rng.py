"""Deterministic, platform-independent random numbers for disorder draws.

SplitMix64 (Steele, Lea, Flood 2014): a 64-bit counter-based generator with a
fixed odd increment and two xor-multiply finalizer rounds.  Every operation is
exact integer arithmetic mod 2^64, so the stream is bit-identical on every
platform.  Uniform doubles use the standard 53-bit construction
``(z >> 11) * 2^-53``.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


class SplitMix64:
    """Stateful SplitMix64 stream seeded by a 64-bit integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MUL1) & _MASK
        z = ((z ^ (z >> 27)) * _MUL2) & _MASK
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        """Uniform double in [0, 1) with a full 53-bit mantissa."""
        return (self.next_u64() >> 11) * 2.0 ** -53


def symmetric_uniform(seed: int, n: int, half_width: float) -> np.ndarray:
    """n i.i.d. draws uniform on [-half_width, half_width], bit-reproducible.

    The draws are binary64 values regardless of any downstream working
    precision, so a realization embeds exactly into wider formats.
    """
    gen = SplitMix64(seed)
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        out[i] = half_width * (2.0 * gen.next_unit() - 1.0)
    return out

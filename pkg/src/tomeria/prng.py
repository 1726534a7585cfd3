"""Deterministic 64-bit PRNG underlying all generation in this package.

SplitMix64 with the standard mixing constants. Every random value the
engine consumes derives from this stream, so identical seeds reproduce
identical worlds bit-for-bit on every platform.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

_F53 = float(1 << 53)

__all__ = [
    "GOLDEN",
    "MASK64",
    "MIX1",
    "MIX2",
    "SplitMix64",
    "mix64",
    "unit_floats",
]


def mix64(z: int) -> int:
    """Finalize one 64-bit state word into an output word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64 stream."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def next_float(self) -> float:
        """Uniform float in [0, 1): top 53 bits of the next word over 2**53."""
        return (self.next_u64() >> 11) / _F53

    def randrange(self, n: int) -> int:
        """Deterministic integer in [0, n)."""
        if n <= 0:
            raise ValueError(f"randrange bound must be positive, got {n}")
        return self.next_u64() % n


def unit_floats(seed: int, count: int) -> NDArray[np.float64]:
    """First `count` unit floats of the stream for `seed`, vectorized.

    Bit-identical to calling ``SplitMix64(seed).next_float()`` `count`
    times: the i-th state word is seed + (i+1)*GOLDEN (mod 2**64), and
    the mix is applied elementwise under uint64 wrap-around.
    """
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) / _F53

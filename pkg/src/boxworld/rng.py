"""Seeded counter-based random words.

Wraps numpy's Philox-4x64-10 keyed directly by the 64-bit seed (no seed
hashing). Only raw 64-bit words are used and every derived quantity is
computed here from bit operations, so a session replays identically on
any platform and numpy version that ships Philox.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

MAX_SEED = 2**64 - 1
DYADIC_BITS = 53


class RngState:
    """A seed plus the number of 64-bit words drawn so far."""

    def __init__(self, seed: int = 0):
        seed = int(seed)
        if not 0 <= seed <= MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.counter = 0
        self._bits = np.random.Philox(key=seed)

    def words(self, n: int) -> np.ndarray:
        out = np.asarray(self._bits.random_raw(n), dtype=np.uint64)
        self.counter += n
        return out

    def word(self) -> int:
        return int(self.words(1)[0])

    def bit(self) -> int:
        return self.word() >> 63

    def dyadic(self) -> Fraction:
        """Uniform on [0, 1) with 53 fractional bits, exactly."""
        return Fraction(self.word() >> (64 - DYADIC_BITS), 2**DYADIC_BITS)

    def __repr__(self):
        return f"RngState(seed={self.seed}, counter={self.counter})"


def top_bit(words: np.ndarray) -> np.ndarray:
    return (words >> np.uint64(63)).astype(np.int8)


def dyadic_numerators(words: np.ndarray) -> np.ndarray:
    """53-bit numerators ``k`` of ``k / 2**53``, vectorised."""
    return words >> np.uint64(64 - DYADIC_BITS)


def unit_floats(words: np.ndarray) -> np.ndarray:
    # exact: every 53-bit dyadic is a double
    return dyadic_numerators(words).astype(np.float64) / float(2**DYADIC_BITS)

"""Counter-based coin sources.

Every coin is a pure function of (seed, trial, draw index), so the Python
reference engine and the compiled fast path produce identical flips.
"""
from __future__ import annotations

from typing import Sequence

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + GOLDEN) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def coin_bit(seed: int, trial: int, draw: int) -> int:
    h = splitmix64((seed & MASK) ^ splitmix64((trial & MASK) ^ splitmix64(draw & MASK)))
    return int(h >> 63)


class HashCoins:
    """Deterministic coin stream for one trial."""

    def __init__(self, seed: int, trial: int = 0):
        self.seed = seed
        self.trial = trial
        self.draws = 0

    def flip(self) -> int:
        b = coin_bit(self.seed, self.trial, self.draws)
        self.draws += 1
        return b


class ListCoins:
    """Replays a fixed coin list; raises once it is exhausted."""

    def __init__(self, bits: Sequence[int]):
        self.bits = list(bits)
        self.draws = 0

    def flip(self) -> int:
        if self.draws >= len(self.bits):
            raise IndexError("coin list exhausted")
        b = self.bits[self.draws]
        self.draws += 1
        return b

"""The red/blue coin timer subroutine TICK.

Heads is the coin value 1.  ``TickState.T`` is true once some red coin came
out tails since the last reset.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..coins import HashCoins

RUNNING, RESET, TIMEOUT = "running", "reset", "timeout"


@dataclass(frozen=True)
class TickParams:
    c: int = 1
    t: int = 0

    def p(self, n: int) -> int:
        value = self.c * n ** self.t
        if value < 1:
            raise ValueError("p(n) must be at least 1")
        return value


@dataclass
class TickState:
    p: int
    T: bool = False
    coins_used: int = 0


def tick(state: TickState, rng) -> str:
    """One call: a red coin, then p blue coins, all drawn from ``rng.flip``."""
    red = rng.flip()
    if red == 0:
        state.T = True
    # all blue coins are tossed, even after a tails
    blues = [rng.flip() for _ in range(state.p)]
    state.coins_used += 1 + state.p
    if not all(blues):
        return RUNNING
    if state.T:
        state.T = False
        return RESET
    return TIMEOUT


def ticks_to_timeout(p: int, rng, limit: int | None = None) -> int:
    """Number of calls up to and including the one that times out."""
    state = TickState(p)
    calls = 0
    while limit is None or calls < limit:
        calls += 1
        if tick(state, rng) == TIMEOUT:
            return calls
    return calls


def expected_ticks(p: int) -> int:
    """Exact mean of ``ticks_to_timeout``: 2^p (2^p + 1).

    A timeout needs a judgement stage (probability 2^-p per call) with an
    all-heads red run since the last reset.  The red run length between
    judgements is geometric, which gives 2^p + 1 judgements on average.
    """
    return 2 ** p * (2 ** p + 1)


def simulate_ticks(p: int, seed: int, runs: int) -> list[int]:
    return [ticks_to_timeout(p, HashCoins(seed, i)) for i in range(runs)]

"""Random-walk polynomial clock M_{t,c,n0} as a private-coin finite automaton.

Stages, all on the input head:

1. Look at cells 0..n0.  If the right endmarker turns up first the input is
   short; stall for f(n) steps and halt.
2. For t = 1: walk back n0 cells to cell 1, then sweep right pausing c-1
   steps after each move, and halt on the right endmarker.
3. For t >= 2: run batches of t gambler's-ruin walks from cell 1, pausing
   c-1 steps after each move.  Halt once a whole batch ends on the right.

Halting is always through the accept state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from ..core import LEFT, RIGHT, MachineSpec, Move


@dataclass(frozen=True)
class ClockParams:
    t: int
    c: int
    n0: int
    eps_premature: float | None = None

    def __post_init__(self):
        if self.t < 1 or self.c < 1 or self.n0 < 0:
            raise ValueError("clock needs t >= 1, c >= 1 and n0 >= 0")
        if self.eps_premature is not None and not self.n0 > 1 / self.eps_premature:
            raise ValueError("n0 must exceed 1/eps_premature")

    def f(self, n: int) -> int:
        return self.c * n ** self.t

    def expected_runtime(self, n: int) -> float:
        """Closed form t (n+1)^t (cn+2) + 2 n0 + 1 for n >= n0 and t >= 2."""
        return self.t * (n + 1) ** self.t * (self.c * n + 2) + 2 * self.n0 + 1

    def sweep_runtime(self, n: int) -> int:
        return 2 * self.n0 + self.c * n + 2


def walk_state(i: int, left_seen: bool) -> str:
    return f"W{i}{'L' if left_seen else 'R'}"


def build_poly_clock(params: ClockParams, sigma: Sequence[str] = ("0", "1"),
                     f: Callable[[int], int] | None = None) -> MachineSpec:
    f = f or params.f
    t, c, n0 = params.t, params.c, params.n0
    tape = (LEFT, *sigma, RIGHT)
    delta: dict = {}
    states: list[str] = []
    pri: set[str] = set()

    def state(q: str) -> str:
        if q not in states:
            states.append(q)
        return q

    def rule(q, s, q2, d, bit=None):
        state(q)
        delta[(q, s, "_", "_", bit, None)] = Move(q2, "_", None, d, 0)

    def fill(q, q2="rej", d=0):
        for s in tape:
            if (q, s, "_", "_", None, None) not in delta:
                rule(q, s, q2, d)

    # stage 1: length check and short-input stall
    for i in range(n0 + 1):
        q = state(f"C{i}")
        nxt = f"C{i + 1}" if i < n0 else (("S0" if n0 else "P0") if t == 1 else "R0")
        if i == 0:
            rule(q, LEFT, nxt, +1)
        for s in sigma:
            rule(q, s, nxt, +1)
        if i >= 1:
            n = i - 1
            steps = f(n)
            chain = [f"D{n}_{j}" for j in range(1, steps + 1)] + ["acc"]
            rule(q, RIGHT, chain[0], 0)
            for a, b in zip(chain, chain[1:]):
                state(a)
                fill(a, b, 0)
        fill(q)

    if t == 1:
        # counted rewind from cell n0+1 to cell 1, then a paced sweep
        rewind = [f"S{j}" for j in range(n0)] + ["P0"]
        for a, b in zip(rewind, rewind[1:]):
            state(a)
            fill(a, b, -1)
        for j in range(c):
            q = state(f"P{j}")
            if j == 0:
                rule(q, RIGHT, "acc", 0)
                for s in sigma:
                    rule(q, s, "P1" if c > 1 else "P0", +1)
            else:
                fill(q, f"P{j + 1}" if j + 1 < c else "P0", 0)
            fill(q)
    else:
        # R{i}{flag}: rewind to the left endmarker, then start walk i
        for i in range(t):
            for seen in (False, True):
                r = state(f"R{i}{'L' if seen else 'R'}" if not (i == 0 and not seen) else "R0")
                w = walk_state(i, seen)
                rule(r, LEFT, w, +1)
                fill(r, r, -1)
        for i in range(t):
            for seen in (False, True):
                w = state(walk_state(i, seen))
                pri.add(w)
                pause = [f"{w}p{j}" for j in range(1, c)] + [w]
                for s in sigma:
                    for bit, d in ((0, -1), (1, +1)):
                        rule(w, s, pause[0], d, bit)
                for a, b in zip(pause, pause[1:]):
                    state(a)
                    fill(a, b, 0)
                last = i == t - 1
                on_left = walk_state(0, False) if last else walk_state(i + 1, True)
                if last:
                    on_right_q, on_right_d = ("acc", 0) if not seen else ("R0", -1)
                else:
                    nxt = f"R{i + 1}{'L' if seen else 'R'}"
                    on_right_q, on_right_d = nxt, -1
                for bit in (0, 1):
                    rule(w, LEFT, on_left, +1, bit)
                    rule(w, RIGHT, on_right_q, on_right_d, bit)
    states += ["acc", "rej"]
    return MachineSpec(
        states=tuple(states), input_alphabet=tuple(sigma), work_alphabet=("_",),
        comm_alphabet=("_",), delta=delta, initial="C0", pri=frozenset(pri), space=0,
    )


def walk_end_marks(params: ClockParams) -> dict[tuple[str, str], int]:
    """Counter ids for the fast engine: 0 = walk ended left, 1 = ended right."""
    marks = {}
    for i in range(params.t):
        for seen in (False, True):
            marks[(walk_state(i, seen), LEFT)] = 0
            marks[(walk_state(i, seen), RIGHT)] = 1
    return marks

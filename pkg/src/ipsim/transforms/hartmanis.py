"""Multihead simulation of a log-space Turing machine.

The (c+5)-head automaton keeps the work tape in the head indices: bit i of
cell j contributes 2^j to the index of track head h_i.  h_alpha mirrors the
input head, h_beta sits at the work-head offset, and h_gamma, h_delta,
h_epsilon are scratch heads that rest on the left endmarker between
simulated steps.

Heads only ever move one cell per step and every loop is driven by a head
reaching the left endmarker, so step counts are those of the automaton.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import LEFT, MachineSpec, input_tape


class PreconditionError(ValueError):
    """The machine is outside what the encoding can simulate."""


@dataclass
class HeadAssignment:
    """Role -> physical head.  Reidentification permutes this map."""

    c: int
    role: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.role:
            names = [f"h{i}" for i in range(1, self.c + 1)] + ["alpha", "beta", "gamma", "delta", "eps"]
            self.role = {name: k for k, name in enumerate(names)}

    @property
    def heads(self) -> int:
        return len(self.role)

    def swap(self, a: str, b: str) -> None:
        self.role[a], self.role[b] = self.role[b], self.role[a]


@dataclass
class HartmanisRun:
    accepted: bool
    steps: int
    tm_steps: int
    aux_at_zero: bool
    bound: int


class HeadMachine:
    """Physical heads on one input tape with a global step counter."""

    def __init__(self, w: str, assignment: HeadAssignment):
        self.tape = input_tape(w)
        self.last = len(self.tape) - 1
        self.h = assignment
        self.pos = [0] * assignment.heads
        self.steps = 0

    def at(self, role: str) -> int:
        return self.pos[self.h.role[role]]

    def on_left(self, role: str) -> bool:
        return self.tape[self.at(role)] == LEFT

    def read(self, role: str) -> str:
        return self.tape[self.at(role)]

    def step(self, moves: dict[str, int]) -> None:
        """One automaton transition moving several heads at once."""
        for role, d in moves.items():
            k = self.h.role[role]
            p = self.pos[k] + d
            if not 0 <= p <= self.last:
                raise PreconditionError(f"head {role} left the tape at {p}")
            self.pos[k] = p
        self.steps += 1

    # -- index arithmetic --------------------------------------------------

    def halve(self, target: str, aux: str, store: str | None = None,
              extra: dict[str, int] | None = None) -> None:
        """target: x -> floor(x/2) via aux; ``store`` mirrors the original x."""
        extra = dict(extra or {})
        k = 0
        while not self.on_left(target):
            k += 1
            moves = {target: -1, **extra}
            if k % 2 == 0:
                moves[aux] = +1
            if store:
                moves[store] = +1
            self.step(moves)
            extra = {}
        if extra:
            self.step(extra)
        self.h.swap(target, aux)

    def double(self, target: str, aux: str, extra: dict[str, int] | None = None) -> None:
        """target: x -> 2x via aux."""
        extra = dict(extra or {})
        while not self.on_left(target):
            self.step({target: -1, aux: +1, **extra})
            self.step({aux: +1})
            extra = {}
        if extra:
            self.step(extra)
        self.h.swap(target, aux)


def halve_index(x: int, n: int | None = None) -> tuple[int, int]:
    """Run HALVE on a head at index ``x``; returns (new index, steps)."""
    n = max(x, 1) if n is None else n
    hm = HeadMachine("0" * n, HeadAssignment(1))
    hm.pos[hm.h.role["h1"]] = x
    hm.halve("h1", "delta")
    return hm.at("h1"), hm.steps


def double_index(x: int, n: int | None = None) -> tuple[int, int]:
    n = max(2 * x, 1) if n is None else n
    hm = HeadMachine("0" * n, HeadAssignment(1))
    hm.pos[hm.h.role["eps"]] = x
    hm.double("eps", "delta")
    return hm.at("eps"), hm.steps


class HartmanisInterpreter:
    """Executable (c+5)-head automaton simulating ``tm``."""

    def __init__(self, tm: MachineSpec, c: int):
        if tm.pri or tm.pub or tm.com:
            raise PreconditionError("the Turing machine must be deterministic and silent")
        if len(tm.work_alphabet) > 2 ** c:
            raise PreconditionError(f"work alphabet needs more than {c} tracks")
        self.tm = tm
        self.c = c
        self.code = {s: i for i, s in enumerate(tm.work_alphabet)}
        self.heads = c + 5

    def space_bound(self, n: int) -> int:
        return (n + 2).bit_length() - 1

    def overhead_bound(self, n: int) -> float:
        return (2 * self.c + 1.5) * n + 2 * self.c + 2

    def _sense(self, hm: HeadMachine) -> int:
        """Read the symbol code under the simulated work head."""
        code = 0
        for i in range(1, self.c + 1):
            hi = f"h{i}"
            b_nonzero = not hm.on_left("beta")
            first = True
            while not hm.on_left("beta"):
                par = {"beta": -1, "gamma": +1}
                hm.halve(hi, "delta", store="eps" if first else None, extra=par)
                first = False
            parity = 0
            while not hm.on_left(hi):
                moves = {hi: -1}
                if not b_nonzero:
                    moves["eps"] = +1
                hm.step(moves)
                parity ^= 1
            code |= parity << (i - 1)
            hm.h.swap(hi, "eps")
            hm.h.swap("beta", "gamma")
        return code

    def _act(self, hm: HeadMachine, old: int, new: int, d_in: int, d_work: int) -> None:
        hm.step({"eps": +1})
        while not hm.on_left("beta"):
            hm.double("eps", "delta", extra={"beta": -1, "gamma": +1})
        hm.h.swap("beta", "gamma")
        flips = {}
        for i in range(1, self.c + 1):
            ob, nb = (old >> (i - 1)) & 1, (new >> (i - 1)) & 1
            if ob != nb:
                flips[f"h{i}"] = +1 if nb else -1
        first = True
        while not hm.on_left("eps"):
            moves = {"eps": -1, **flips}
            if first:
                # state, input head and work head update ride along
                moves.update({k: v for k, v in (("alpha", d_in), ("beta", d_work)) if v})
                first = False
            hm.step(moves)

    def run(self, w: str, max_tm_steps: int = 1_000_000) -> HartmanisRun:
        tm = self.tm
        n = len(w)
        cells = self.space_bound(n)
        hm = HeadMachine(w, HeadAssignment(self.c))
        q = tm.initial
        aux_ok = True
        tm_steps = 0
        blank = tm.work_blank
        while tm_steps < max_tm_steps:
            tm_steps += 1
            sigma = hm.read("alpha")
            phi = tm.work_alphabet[self._sense(hm)]
            move = tm.lookup(q, sigma, phi, tm.comm_blank, None, None)
            b = hm.at("beta")
            ip = hm.at("alpha") + move.d_in
            halted = move.state in (tm.accept, tm.reject) or not 0 <= ip <= hm.last \
                or b + move.d_work < 0
            if halted:
                hm.step({})
                accepted = move.state == tm.accept
                break
            if move.work != blank and b >= cells:
                raise PreconditionError(f"work cell {b} exceeds the {cells}-cell budget")
            if b + move.d_work > cells:
                raise PreconditionError("work head runs past the space budget")
            self._act(hm, self.code[phi], self.code[move.work], move.d_in, move.d_work)
            q = move.state
            aux_ok &= all(hm.at(r) == 0 for r in ("gamma", "delta", "eps"))
        else:
            raise PreconditionError("Turing machine did not halt")
        bound = tm_steps * self.overhead_bound(n)
        return HartmanisRun(accepted, hm.steps, tm_steps, aux_ok, bound)


def hartmanis_encode(tm: MachineSpec, c: int) -> HartmanisInterpreter:
    return HartmanisInterpreter(tm, c)

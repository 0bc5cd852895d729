"""Compiled trial runner for private-coin automata without work tape or prover.

Produces exactly the coins, and hence the outcomes, of ``engines.run_trial``
with an integer seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .core import MachineSpec, MissingTransition, input_tape
from .engines import ACCEPT, CUTOFF, REJECT

_VERDICTS = (ACCEPT, REJECT, CUTOFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix(x):
    x = x + _GOLDEN
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


@njit(cache=True, inline="always")
def _coin(seed, trial, draw):
    h = _mix(seed ^ _mix(trial ^ _mix(draw)))
    return np.int64(h >> np.uint64(63))


@dataclass(frozen=True)
class PfaTables:
    states: tuple[str, ...]
    symbols: tuple[str, ...]
    next_state: np.ndarray  # [q, sym, bit] -> q', -1 if missing
    next_dir: np.ndarray
    is_pri: np.ndarray
    accept: int
    reject: int


def compile_pfa(spec: MachineSpec) -> PfaTables:
    if spec.pub or spec.com:
        raise ValueError("fast engine needs a machine without public coins or communication")
    blank = spec.work_blank
    for m in spec.delta.values():
        if m.work != blank or m.d_work != 0:
            raise ValueError("fast engine needs a machine that never uses its work tape")
    symbols = spec.tape_alphabet
    qi = {q: i for i, q in enumerate(spec.states)}
    si = {s: i for i, s in enumerate(symbols)}
    nq, ns = len(spec.states), len(symbols)
    nxt = np.full((nq, ns, 2), -1, dtype=np.int64)
    dirs = np.zeros((nq, ns, 2), dtype=np.int64)
    for (q, s, phi, g, bpri, _), m in spec.delta.items():
        if phi != blank or g != spec.comm_blank:
            continue
        for b in ((bpri,) if bpri is not None else (0, 1)):
            nxt[qi[q], si[s], b] = qi[m.state]
            dirs[qi[q], si[s], b] = m.d_in
    is_pri = np.array([q in spec.pri for q in spec.states], dtype=np.bool_)
    return PfaTables(spec.states, symbols, nxt, dirs, is_pri, qi[spec.accept], qi[spec.reject])


@njit(cache=True, parallel=True)
def _run(nxt, dirs, is_pri, acc, rej, start, tape, seed, trial0, trials, cutoff, marks, n_marks):
    steps = np.zeros(trials, dtype=np.int64)
    verdict = np.zeros(trials, dtype=np.int64)
    coins = np.zeros(trials, dtype=np.int64)
    counts = np.zeros((trials, max(n_marks, 1)), dtype=np.int64)
    last = tape.shape[0] - 1
    useed = np.uint64(seed)
    for t in prange(trials):
        ut = np.uint64(trial0 + t)
        q = start
        pos = 0
        draw = 0
        v = 2
        k = 0
        while k < cutoff:
            sym = tape[pos]
            b = 0
            if is_pri[q]:
                b = _coin(useed, ut, np.uint64(draw))
                draw += 1
            ev = marks[q, sym]
            if ev >= 0:
                counts[t, ev] += 1
            q2 = nxt[q, sym, b]
            k += 1
            if q2 < 0:
                v = 3
                break
            pos += dirs[q, sym, b]
            if q2 == acc:
                v = 0
                break
            if q2 == rej or pos < 0 or pos > last:
                v = 1
                break
            q = q2
        steps[t] = k
        verdict[t] = v
        coins[t] = draw
    return steps, verdict, coins, counts


@dataclass
class FastBatch:
    steps: np.ndarray
    verdicts: np.ndarray  # 0 accept, 1 reject, 2 cutoff
    private_coins: np.ndarray
    counts: np.ndarray

    def verdict(self, i: int) -> str:
        return _VERDICTS[int(self.verdicts[i])]


def run_fast(spec: MachineSpec, w: str, seed: int, trials: int, cutoff: int,
             trial0: int = 0, marks: dict[tuple[str, str], int] | None = None,
             tables: PfaTables | None = None) -> FastBatch:
    """Run ``trials`` seeded trials; ``marks`` maps (state, symbol) to a counter id."""
    tables = tables or compile_pfa(spec)
    si = {s: i for i, s in enumerate(tables.symbols)}
    qi = {q: i for i, q in enumerate(tables.states)}
    tape = np.array([si[s] for s in input_tape(w)], dtype=np.int64)
    mark_arr = np.full((len(tables.states), len(tables.symbols)), -1, dtype=np.int64)
    n_marks = 0
    for (q, s), ev in (marks or {}).items():
        mark_arr[qi[q], si[s]] = ev
        n_marks = max(n_marks, ev + 1)
    steps, verdict, coins, counts = _run(
        tables.next_state, tables.next_dir, tables.is_pri, tables.accept, tables.reject,
        qi[spec.initial], tape, seed & ((1 << 64) - 1), trial0, trials, cutoff, mark_arr, n_marks,
    )
    if (verdict == 3).any():
        raise MissingTransition("fast engine hit an undefined transition")
    return FastBatch(steps, verdict, coins, counts[:, :n_marks])

"""Prover strategies: scripted, constant and horizon-optimal."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .core import MachineSpec, initial_configuration, input_tape
from .engines import (
    ACCEPT, PROVER_WRITE, PUBLIC_COIN, REJECT, VERIFIER_WRITE, BudgetExceeded, _transition,
)


@dataclass(frozen=True)
class ProverStrategy:
    """Deterministic reply function of (input, public coins, transcript).

    The transcript is the tuple of observable ``(kind, payload)`` events,
    ending with the verifier write being answered.
    """

    fn: Callable[[str, tuple, tuple], str]
    name: str = "prover"
    role: str = "honest"

    def respond(self, w: str, public: tuple, transcript: tuple) -> str:
        return self.fn(w, tuple(public), tuple(transcript))


def constant_prover(symbol: str, name: str | None = None) -> ProverStrategy:
    return ProverStrategy(lambda w, pub, tr: symbol, name or f"constant[{symbol}]")


def _freeze(prefix) -> tuple:
    return tuple((k, p) for k, p in prefix)


def scripted_prover(script: Mapping, default: str, name: str = "scripted",
                    role: str = "adversarial") -> ProverStrategy:
    """Answer from ``script`` when the transcript so far is a key, else ``default``."""
    table = {_freeze(k): v for k, v in script.items()}
    return ProverStrategy(lambda w, pub, tr: table.get(tr, default), name, role)


def load_prover(path) -> ProverStrategy:
    """JSON: ``{"default": sym, "script": [[[[kind, payload], ...], sym], ...]}``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    script = {_freeze(prefix): sym for prefix, sym in doc.get("script", [])}
    return scripted_prover(script, doc["default"], doc.get("name", "scripted"),
                           doc.get("role", "adversarial"))


def echo_public_prover(symbols: Mapping[int, str], default: str) -> ProverStrategy:
    """Replies with ``symbols[b]`` where ``b`` is the latest public coin."""
    return ProverStrategy(
        lambda w, pub, tr: symbols[pub[-1]] if pub else default, "echo-public"
    )


class _Fixed:
    def __init__(self, reply):
        self.reply = reply

    def respond(self, w, public, transcript):
        return self.reply


class _Never:
    def respond(self, w, public, transcript):
        raise AssertionError("silent step consulted the prover")


def optimal_bounded_prover(spec: MachineSpec, w: str, horizon: int,
                           node_budget: int = 200_000) -> tuple[ProverStrategy, Fraction]:
    """Best deterministic prover for acceptance within ``horizon`` steps.

    Works on the prover's observation tree.  All probability mass sharing an
    observable history sits in one node, so the reply chosen at a node applies
    to every hidden branch consistent with it; maximizing child values
    independently is then the same as searching every response function.
    Ties go to the earliest symbol of the comm alphabet.
    """
    tape = input_tape(w)
    start = initial_configuration(spec, w)
    choices: dict[tuple, str] = {}
    visited = [0]

    def public_of(obs):
        return tuple(p for k, p in obs if k == PUBLIC_COIN)

    def solve(obs: tuple, ready: dict, pending: dict) -> Fraction:
        visited[0] += 1
        if visited[0] > node_budget:
            raise BudgetExceeded("observation tree exceeds node budget")
        if obs and obs[-1][0] == VERIFIER_WRITE:
            best_val, best_sym = None, None
            for reply in spec.comm_alphabet:
                acc, nxt = Fraction(0), defaultdict(Fraction)
                fixed = _Fixed(reply)
                public = public_of(obs)
                for (cfg, bpri, bpub, rem), mass in pending.items():
                    res = _transition(spec, cfg, tape, w, bpri, bpub, fixed, public, obs)
                    if res.verdict == ACCEPT:
                        acc += mass
                    elif res.verdict is None:
                        nxt[(res.config, rem - 1)] += mass
                val = acc + (solve(obs + ((PROVER_WRITE, reply),), dict(nxt), {}) if nxt else 0)
                if best_val is None or val > best_val:
                    best_val, best_sym = val, reply
            choices[obs] = best_sym
            return best_val

        acc = Fraction(0)
        children: dict[tuple, tuple[dict, dict]] = defaultdict(lambda: (defaultdict(Fraction), defaultdict(Fraction)))
        for (cfg, bpri, bpub, rem), mass in pending.items():
            move = spec.lookup(cfg.state, tape[cfg.input_pos], cfg.read_work(spec.work_blank),
                               cfg.comm, bpri, bpub)
            children[obs + ((VERIFIER_WRITE, move.comm),)][1][(cfg, bpri, bpub, rem)] += mass
        work = defaultdict(Fraction, ready)
        public = public_of(obs)
        while work:
            # highest remaining budget first keeps merging effective
            key = max(work, key=lambda k: k[1])
            mass = work.pop(key)
            cfg, rem = key
            if rem <= 0:
                continue
            outcomes = spec.coin_bits(cfg.state)
            share = mass / len(outcomes)
            for bpri, bpub in outcomes:
                move = spec.lookup(cfg.state, tape[cfg.input_pos],
                                   cfg.read_work(spec.work_blank), cfg.comm, bpri, bpub)
                if move.comm is not None:
                    if bpub is not None:
                        child = obs + ((PUBLIC_COIN, bpub),)
                        children[child][1][(cfg, bpri, bpub, rem)] += share
                    else:
                        child = obs + ((VERIFIER_WRITE, move.comm),)
                        children[child][1][(cfg, bpri, bpub, rem)] += share
                    continue
                res = _transition(spec, cfg, tape, w, bpri, bpub, _Never(), public, obs)
                if res.verdict == ACCEPT:
                    acc += share
                elif res.verdict == REJECT:
                    pass
                elif bpub is not None:
                    children[obs + ((PUBLIC_COIN, bpub),)][0][(res.config, rem - 1)] += share
                else:
                    work[(res.config, rem - 1)] += share
        for child, (r, p) in children.items():
            acc += solve(child, dict(r), dict(p))
        return acc

    value = solve((), {(start, horizon): Fraction(1)}, {})
    blank = spec.comm_blank
    table = dict(choices)

    def respond(w2, pub, tr):
        return table.get(tr, blank) if w2 == w else blank

    return ProverStrategy(respond, f"optimal[h={horizon}]", "honest"), value

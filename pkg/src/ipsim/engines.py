"""Execution semantics for verifiers, kNFAs and 2AFAs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence

from .coins import HashCoins
from .core import (
    Configuration, KnfaSpec, MachineSpec, TafaSpec, initial_configuration, input_tape,
)

ACCEPT, REJECT, CUTOFF = "accept", "reject", "cutoff"
VERIFIER_WRITE, PROVER_WRITE, PUBLIC_COIN = "verifier_write", "prover_write", "public_coin"


class SpaceViolation(RuntimeError):
    """The verifier left its declared work-tape budget."""


class BudgetExceeded(RuntimeError):
    """An exact computation outgrew its configured memory budget."""


class Prover(Protocol):
    def respond(self, w: str, public: tuple[int, ...], transcript: tuple) -> str: ...


@dataclass(frozen=True)
class TranscriptEvent:
    kind: str
    payload: str | int
    step: int


@dataclass
class TrialOutcome:
    verdict: str
    steps: int
    private_coins_used: int = 0
    public_coins_used: int = 0
    transcript: tuple[TranscriptEvent, ...] = ()
    info: dict = field(default_factory=dict)


@dataclass
class StepResult:
    config: Configuration | None
    verdict: str | None
    events: list[tuple[str, str | int]]
    private_bit: int | None
    public_bit: int | None


def _transition(spec: MachineSpec, cfg: Configuration, tape, w, bpri, bpub,
                prover, public: tuple, observed: tuple) -> StepResult:
    """Apply one δ entry for fixed coin outcomes."""
    blank = spec.work_blank
    move = spec.lookup(cfg.state, tape[cfg.input_pos], cfg.read_work(blank), cfg.comm, bpri, bpub)
    events: list[tuple[str, str | int]] = []
    if bpub is not None:
        events.append((PUBLIC_COIN, bpub))
        public = public + (bpub,)
    comm = cfg.comm
    if move.comm is not None:
        events.append((VERIFIER_WRITE, move.comm))
        reply = prover.respond(w, public, observed + tuple(events))
        if reply not in spec.comm_alphabet:
            raise ValueError(f"prover answered {reply!r}, not a comm symbol")
        events.append((PROVER_WRITE, reply))
        comm = reply
    ip = cfg.input_pos + move.d_in
    wp = cfg.work_pos + move.d_work
    if move.state == spec.accept:
        return StepResult(None, ACCEPT, events, bpri, bpub)
    if move.state == spec.reject or not 0 <= ip < len(tape) or wp < 0:
        return StepResult(None, REJECT, events, bpri, bpub)
    work = cfg.write_work(move.work, blank)
    if spec.space is not None and (wp > spec.space or len(work) > spec.space):
        raise SpaceViolation(f"work head at {wp} exceeds budget {spec.space}")
    return StepResult(Configuration(move.state, work, comm, ip, wp), None, events, bpri, bpub)


def verifier_step(spec: MachineSpec, cfg: Configuration, w: str, coins, prover: Prover,
                  history: Sequence[tuple[str, str | int]] = ()) -> StepResult:
    """One step: flip the coins the state calls for, then apply δ.

    ``history`` is the observable event list so far as (kind, payload) pairs.
    """
    bpri = coins.flip() if cfg.state in spec.pri else None
    bpub = coins.flip() if cfg.state in spec.pub else None
    history = tuple(history)
    public = tuple(p for k, p in history if k == PUBLIC_COIN)
    return _transition(spec, cfg, input_tape(w), w, bpri, bpub, prover, public, history)


def run_trial(spec: MachineSpec, prover: Prover, w: str, rng=0, cutoff: int = 10_000,
              trial: int = 0, record: bool = True) -> TrialOutcome:
    """Run from the initial configuration until a verdict or ``cutoff`` steps.

    ``rng`` is either a coin source with a ``flip`` method or an integer seed.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    coins = HashCoins(rng, trial) if isinstance(rng, int) else rng
    tape = input_tape(w)
    cfg = initial_configuration(spec, w)
    observed: tuple = ()
    public: tuple = ()
    log: list[TranscriptEvent] = []
    n_pri = n_pub = 0
    for step in range(cutoff):
        bpri = coins.flip() if cfg.state in spec.pri else None
        bpub = coins.flip() if cfg.state in spec.pub else None
        res = _transition(spec, cfg, tape, w, bpri, bpub, prover, public, observed)
        n_pri += bpri is not None
        n_pub += bpub is not None
        if res.events:
            observed = observed + tuple(res.events)
            if bpub is not None:
                public = public + (bpub,)
            if record:
                log.extend(TranscriptEvent(k, p, step) for k, p in res.events)
        if res.verdict is not None:
            return TrialOutcome(res.verdict, step + 1, n_pri, n_pub, tuple(log))
        cfg = res.config
    return TrialOutcome(CUTOFF, cutoff, n_pri, n_pub, tuple(log))


def exact_acceptance(spec: MachineSpec, prover: Prover, w: str, cutoff: int,
                     budget: int = 200_000) -> tuple[Fraction, Fraction, Fraction]:
    """Exact (accept, reject, alive) masses after ``cutoff`` steps."""
    tape = input_tape(w)
    start = initial_configuration(spec, w)
    belief: dict[tuple, Fraction] = {(start, ()): Fraction(1)}
    acc = rej = Fraction(0)
    for _ in range(cutoff):
        if not belief:
            break
        nxt: dict[tuple, Fraction] = {}
        for (cfg, observed), mass in belief.items():
            public = tuple(p for k, p in observed if k == PUBLIC_COIN)
            outcomes = spec.coin_bits(cfg.state)
            share = mass / len(outcomes)
            for bpri, bpub in outcomes:
                res = _transition(spec, cfg, tape, w, bpri, bpub, prover, public, observed)
                if res.verdict == ACCEPT:
                    acc += share
                elif res.verdict == REJECT:
                    rej += share
                else:
                    key = (res.config, observed + tuple(res.events))
                    nxt[key] = nxt.get(key, 0) + share
        if len(nxt) > budget:
            raise BudgetExceeded(f"support {len(nxt)} exceeds budget {budget}")
        belief = nxt
    alive = sum(belief.values(), Fraction(0))
    return acc, rej, alive


# ---------------------------------------------------------------------------
# kNFA and 2AFA

def knfa_accepts(m: KnfaSpec, w: str) -> bool:
    tape = input_tape(w)
    last = len(tape) - 1
    start = (m.initial, (0,) * m.heads)
    if m.initial == m.accept:
        return True
    seen = {start}
    queue = deque([start])
    while queue:
        q, pos = queue.popleft()
        if q in (m.accept, m.reject):
            continue
        syms = tuple(tape[p] for p in pos)
        for q2, dirs in m.moves(q, syms):
            new = tuple(p + d for p, d in zip(pos, dirs))
            if any(p < 0 or p > last for p in new):
                continue
            if q2 == m.accept:
                return True
            node = (q2, new)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    return False


def tafa_winning(m: TafaSpec, w: str) -> set[tuple[str, int]]:
    """Configurations from which acceptance can be forced (least fixpoint)."""
    tape = input_tape(w)
    last = len(tape) - 1
    nodes = [(q, p) for q in m.states for p in range(last + 1)]
    succ: dict = {}
    off_tape: set = set()
    pred: dict = {node: [] for node in nodes}
    for node in nodes:
        q, p = node
        if q in (m.accept, m.reject):
            succ[node] = set()
            continue
        moves = m.moves(q, tape[p])
        out = {(q2, p + d) for q2, d in moves if 0 <= p + d <= last}
        succ[node] = out
        if len(out) < len({(q2, p + d) for q2, d in moves}):
            off_tape.add(node)
        for s in out:
            pred[s].append(node)
    # a branch that leaves the tape loses; a universal node with one can never be won
    remaining = {node: len(succ[node]) + (node in off_tape) for node in nodes}
    won: set = set()
    queue = deque()
    for node in nodes:
        q = node[0]
        if q == m.accept or (q in m.forall and not remaining[node]):
            won.add(node)
            queue.append(node)
    while queue:
        node = queue.popleft()
        for p in pred[node]:
            if p in won:
                continue
            if p[0] in m.forall:
                remaining[p] -= 1
                if remaining[p] > 0:
                    continue
            won.add(p)
            queue.append(p)
    return won


def tafa_accepts(m: TafaSpec, w: str) -> bool:
    return (m.initial, 0) in tafa_winning(m, w)

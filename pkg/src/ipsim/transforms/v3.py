"""Single-head simulation of a k-head public-coin verifier (interpreted).

Each round draws r private bits to choose a mode: head H_i (index i < k)
or TIMER.  The prover streams claims about every head's reading; the
verifier follows one head and checks its claim, or in TIMER mode runs the
random-walk clock with its head and rejects if the clock halts first.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..coins import HashCoins
from ..core import KnfaSpec, input_tape
from ..engines import (
    ACCEPT, CUTOFF, PROVER_WRITE, PUBLIC_COIN, REJECT, VERIFIER_WRITE, TranscriptEvent,
    TrialOutcome,
)
from ..provers import ProverStrategy
from .clock import ClockParams, build_poly_clock

TIMER = "TIMER"
ROUND, STEP = ("round",), ("step",)


@dataclass(frozen=True)
class MultiheadVerifier:
    """k-head verifier without work tape; coins are public.

    ``delta`` maps (state, readings, comm, coin-or-None) to
    (state, directions, comm-write-or-None).
    """

    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    heads: int
    delta: dict = field(hash=False)
    initial: str = "q0"
    accept: str = "acc"
    reject: str = "rej"
    pub: frozenset = frozenset()
    com: frozenset = frozenset()
    comm_alphabet: tuple[str, ...] = ("_",)

    __hash__ = object.__hash__

    @classmethod
    def from_knfa(cls, m: KnfaSpec) -> "MultiheadVerifier":
        delta = {}
        for (q, syms), moves in m.delta.items():
            if len(moves) > 1:
                raise ValueError("only deterministic automata can be wrapped")
            for q2, dirs in moves:
                delta[(q, syms, "_", None)] = (q2, dirs, None)
        return cls(m.states, m.input_alphabet, m.heads, delta, m.initial, m.accept, m.reject)

    def step(self, q, readings, gamma, coin):
        return self.delta.get((q, tuple(readings), gamma, coin if q in self.pub else None))

    def run(self, w: str, coins=None, replies=None, limit: int = 100_000):
        """Direct k-head execution; returns (verdict, steps)."""
        tape = input_tape(w)
        pos = [0] * self.heads
        q, gamma = self.initial, self.comm_alphabet[0]
        for k in range(1, limit + 1):
            b = coins.flip() if q in self.pub and coins is not None else None
            mv = self.step(q, [tape[p] for p in pos], gamma, b)
            if mv is None:
                return REJECT, k
            q, dirs, out = mv
            if out is not None and replies is not None:
                gamma = replies(out)
            pos = [p + d for p, d in zip(pos, dirs)]
            if q == self.accept:
                return ACCEPT, k
            if q == self.reject or any(p < 0 or p >= len(tape) for p in pos):
                return REJECT, k
        return CUTOFF, limit


@dataclass(frozen=True)
class V3Params:
    k: int
    r: int
    m: int
    clock: ClockParams

    def __post_init__(self):
        if not self.k * 2.0 ** -self.r < 1:
            raise ValueError("need k * 2^-r < 1")
        if self.m < 1:
            raise ValueError("need at least one round")

    @property
    def p(self) -> float:
        return 2.0 ** -self.r

    @property
    def p_head(self) -> float:
        return self.k * self.p

    @property
    def p_timer(self) -> float:
        return 1 - self.p_head

    def completeness_bound(self, eps_premature: float) -> float:
        """1 - eps3_plus for eps3_plus = 1 - (1 - p_timer * eps)^m."""
        return (1 - self.p_timer * eps_premature) ** self.m


def mode_name(index: int, k: int) -> str:
    return f"H{index + 1}" if index < k else TIMER


class V3Composite:
    """Executable single-head verifier; instantiate state per trial."""

    def __init__(self, v2: MultiheadVerifier, params: V3Params, force_mode: str | None = None):
        for (q, _, _, _), (_, _, out) in v2.delta.items():
            if out is not None and out != v2.comm_alphabet[0]:
                raise ValueError("the simulated verifier must only send the blank")
        if params.k != v2.heads:
            raise ValueError("params.k must equal the simulated head count")
        self.v2 = v2
        self.params = params
        self.force_mode = force_mode
        self.clock = build_poly_clock(params.clock, v2.input_alphabet)

    def descriptor(self) -> dict:
        p = self.params
        return {
            "construction": "v3",
            "k": p.k, "r": p.r, "m": p.m,
            "p": p.p, "p_head": p.p_head, "p_timer": p.p_timer,
            "clock": {"t": p.clock.t, "c": p.clock.c, "n0": p.clock.n0,
                      "eps_premature": p.clock.eps_premature},
            "timer_interleaving": "one clock step per simulated step; the clock "
                                  "uses that step's public coin",
        }

    def run_trial(self, prover: ProverStrategy, w: str, rng=0, cutoff: int = 100_000,
                  trial: int = 0, record: bool = False) -> TrialOutcome:
        coins = HashCoins(rng, trial) if isinstance(rng, int) else rng
        v2, k, clock = self.v2, self.params.k, self.clock
        tape = input_tape(w)
        observed: list = []
        public: list[int] = []
        log: list[TranscriptEvent] = []
        steps = n_pri = n_pub = 0
        pos = 0
        modes: list[str] = []

        def ask(msg):
            observed.append((VERIFIER_WRITE, msg))
            reply = prover.respond(w, tuple(public), tuple(observed))
            observed.append((PROVER_WRITE, reply))
            if record:
                log.append(TranscriptEvent(VERIFIER_WRITE, str(msg), steps))
                log.append(TranscriptEvent(PROVER_WRITE, str(reply), steps))
            return reply

        def done(verdict, **extra):
            return TrialOutcome(verdict, steps, n_pri, n_pub, tuple(log),
                                {"modes": modes, **extra})

        for rnd in range(self.params.m):
            index = 0
            for _ in range(self.params.r):
                index = 2 * index + coins.flip()
                n_pri += 1
                steps += 1
            mode = self.force_mode or mode_name(index, k)
            modes.append(mode)
            if steps >= cutoff:
                return done(CUTOFF, cutoff_mode=mode, round=rnd)
            while pos > 0:
                pos -= 1
                steps += 1
            steps += 1
            claim = ask(ROUND)
            q, gamma2, talked = v2.initial, v2.comm_alphabet[0], False
            cq, cpos = clock.initial, 0
            tracked = int(mode[1:]) - 1 if mode != TIMER else None
            while True:
                if steps >= cutoff:
                    return done(CUTOFF, cutoff_mode=mode, round=rnd)
                steps += 1
                if mode == TIMER and cq == clock.accept:
                    return done(REJECT, reject_mode=mode, round=rnd, reason="timeout")
                if q == v2.reject:
                    return done(REJECT, reject_mode=mode, round=rnd, reason="simulated reject")
                readings, reply2 = claim
                if tracked is not None and tape[pos] != readings[tracked]:
                    return done(REJECT, reject_mode=mode, round=rnd, reason="claim mismatch")
                if talked and reply2 is not None:
                    gamma2 = reply2
                b = coins.flip()
                n_pub += 1
                public.append(b)
                observed.append((PUBLIC_COIN, b))
                if record:
                    log.append(TranscriptEvent(PUBLIC_COIN, b, steps))
                mv = v2.step(q, readings, gamma2, b)
                if mv is None:
                    q, dirs, talked = v2.reject, (0,) * k, False
                else:
                    q, dirs, out = mv
                    talked = out is not None
                if mode == TIMER:
                    cm = clock.lookup(cq, tape[cpos], "_", "_", b if cq in clock.pri else None, None)
                    cq, cpos = cm.state, cpos + cm.d_in
                    if not 0 <= cpos < len(tape):
                        cq = clock.reject
                    pos = cpos
                else:
                    pos += dirs[tracked]
                    if not 0 <= pos < len(tape):
                        return done(REJECT, reject_mode=mode, round=rnd, reason="head left tape")
                if q == v2.accept:
                    break
                claim = ask(STEP)
        return done(ACCEPT)


def build_v3(v2: MultiheadVerifier, params: V3Params, force_mode: str | None = None) -> V3Composite:
    return V3Composite(v2, params, force_mode)


# -- provers -----------------------------------------------------------------

class _Replay:
    """Re-runs the simulated verifier for the current round from the transcript.

    ``distort`` rewrites the true readings into the claimed ones; the
    simulated heads move as the claims dictate, exactly as in the verifier.
    State is memoised so that a growing transcript costs one step per call.
    """

    def __init__(self, v2: MultiheadVerifier, p2=None, distort=None):
        self.v2, self.p2 = v2, p2
        self.distort = distort or (lambda readings, i: readings)
        self.key = None

    def __call__(self, w: str, transcript: tuple):
        v2 = self.v2
        tape = input_tape(w)
        start = len(transcript) - 1 - transcript[::-1].index((VERIFIER_WRITE, ROUND))
        if not (self.key is not None and self.key[0] == w and self.key[1] == start
                and len(transcript) >= len(self.key[2]) and transcript[:len(self.key[2])] == self.key[2]):
            self.seen = start
            self.coins: list[int] = []
            self.pos = [0] * v2.heads
            self.q, self.gamma, self.pending, self.sent = v2.initial, v2.comm_alphabet[0], None, []
        for kind, b in transcript[self.seen:]:
            if kind == PUBLIC_COIN:
                self._advance(tape, w, b)
        self.seen = len(transcript)
        self.key = (w, start, transcript)
        return self.distort(tuple(tape[p] for p in self.pos), len(self.coins)), self.pending

    def _advance(self, tape, w, b):
        v2 = self.v2
        claimed = self.distort(tuple(tape[p] for p in self.pos), len(self.coins))
        self.coins.append(b)
        mv = v2.step(self.q, claimed, self.gamma, b)
        if mv is None or self.q in (v2.accept, v2.reject):
            self.q = v2.reject
            return
        self.q, dirs, out = mv
        self.pending = None
        if out is not None:
            self.sent.append(out)
            self.pending = (self.p2(w, tuple(self.coins), tuple(self.sent))
                            if self.p2 else v2.comm_alphabet[0])
            self.gamma = self.pending
        self.pos = [min(max(p + d, 0), len(tape) - 1) for p, d in zip(self.pos, dirs)]


def _with(readings, head, symbol):
    fake = list(readings)
    fake[head] = symbol
    return tuple(fake)


def honest_v3_prover(v2: MultiheadVerifier, p2=None) -> ProverStrategy:
    """Reports every head's true reading (and P2's answers through ``p2``)."""

    replay = _Replay(v2, p2)

    def respond(w, public, transcript):
        return replay(w, transcript)

    return ProverStrategy(respond, "honest-v3", "honest")


def looping_v3_prover(v2: MultiheadVerifier, head: int, symbol: str) -> ProverStrategy:
    """Truthful at round start, then claims ``head`` reads ``symbol`` forever."""

    replay = _Replay(v2, distort=lambda rd, i: rd if i == 0 else _with(rd, head, symbol))

    def respond(w, public, transcript):
        return replay(w, transcript)

    return ProverStrategy(respond, f"loop-h{head + 1}", "adversarial")


def lying_v3_prover(v2: MultiheadVerifier, head: int, replacement: str, at_step: int) -> ProverStrategy:
    """Truthful except that ``head`` is claimed to read ``replacement`` at simulated step ``at_step``."""
    replay = _Replay(v2, distort=lambda rd, i: _with(rd, head, replacement) if i == at_step else rd)

    def respond(w, public, transcript):
        return replay(w, transcript)

    return ProverStrategy(respond, f"lie-h{head + 1}@{at_step}", "adversarial")

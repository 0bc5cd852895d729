"""Public-coin simulation of a private-coin verifier (interpreted).

All 2^r private coin strings are run side by side as *sims*.  Sim i uses
the bits of bin_r(i), most significant first.  Sims sharing a communication
history form a block of the communication partition; the prover must give
every sim in a block the same answer.  Stages end with one public coin and
a TICK call; after the last stage r public coins pick the sim whose verdict
is mirrored.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..coins import HashCoins
from ..core import Configuration, MachineSpec, count_configurations, initial_configuration, input_tape
from ..engines import (
    ACCEPT, CUTOFF, PROVER_WRITE, PUBLIC_COIN, REJECT, VERIFIER_WRITE, SpaceViolation,
    TranscriptEvent, TrialOutcome, _transition,
)
from ..provers import ProverStrategy
from .tick import TIMEOUT, TickParams, TickState, tick

HALT_ACC, HALT_REJ, LOOPING, WAIT_COIN = "accepted", "rejected", "looping", "waiting-coin"


def bin_r(i: int, r: int) -> tuple[int, ...]:
    return tuple(int(c) for c in format(i, f"0{r}b")) if r else ()


def work_budget(v1: MachineSpec) -> int:
    if v1.space is not None:
        return v1.space
    blank = v1.work_blank
    if all(m.work == blank and m.d_work == 0 for m in v1.delta.values()):
        return 0
    raise ValueError("the source verifier needs a declared work budget")


@dataclass(frozen=True)
class V2Params:
    r: int
    tick: TickParams = field(default_factory=TickParams)
    f_n: int | None = None
    g_n: int | None = None

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be non-negative")
        if self.f_n is not None and self.g_n != self.f_n ** (2 ** self.r):
            raise ValueError("g_n must equal f_n^(2^r)")

    @classmethod
    def for_input(cls, v1: MachineSpec, n: int, r: int, tick: TickParams | None = None) -> "V2Params":
        f = count_configurations(v1, n, work_budget(v1))
        return cls(r, tick or TickParams(), f, f ** (2 ** r))

    def bounds(self, v1: MachineSpec, n: int) -> tuple[int, int]:
        if self.f_n is not None:
            return self.f_n, self.g_n
        f = count_configurations(v1, n, work_budget(v1))
        return f, f ** (2 ** self.r)


class _Reply:
    def __init__(self, symbol):
        self.symbol = symbol

    def respond(self, w, public, transcript):
        return self.symbol


@dataclass
class _Sim:
    cfg: Configuration | None
    bits: tuple[int, ...]
    label: str | None = None
    loop_at: int | None = None


class V2Composite:
    def __init__(self, v1: MachineSpec, params: V2Params):
        if v1.pub and not v1.pub <= v1.com:
            raise ValueError("public coin states must communicate")
        work_budget(v1)
        self.v1 = v1
        self.params = params

    def descriptor(self) -> dict:
        return {"construction": "v2", "r": self.params.r, "sims": 2 ** self.params.r,
                "tick": {"c": self.params.tick.c, "t": self.params.tick.t},
                "f_n": self.params.f_n, "g_n": self.params.g_n,
                "filler": self.v1.comm_blank}

    # -- one sim ---------------------------------------------------------

    def _peek(self, sim: _Sim, tape, bpub=None):
        """Coins and δ entry for the sim's next transition, or None if out of bits."""
        v1, cfg = self.v1, sim.cfg
        bpri = None
        if cfg.state in v1.pri:
            if not sim.bits:
                return None
            bpri = sim.bits[0]
        mv = v1.delta.get((cfg.state, tape[cfg.input_pos], cfg.read_work(v1.work_blank),
                           cfg.comm, bpri, bpub if cfg.state in v1.pub else None))
        return bpri, mv

    def _apply(self, sim: _Sim, tape, w, bpub=None, reply=None) -> None:
        v1 = self.v1
        peek = self._peek(sim, tape, bpub)
        if peek is None or peek[1] is None:
            sim.cfg, sim.label = None, HALT_REJ
            return
        bpri, _ = peek
        if bpri is not None:
            sim.bits = sim.bits[1:]
        try:
            res = _transition(v1, sim.cfg, tape, w, bpri, bpub if sim.cfg.state in v1.pub else None,
                              _Reply(reply if reply is not None else sim.cfg.comm), (), ())
        except SpaceViolation:
            sim.cfg, sim.label = None, HALT_REJ
            return
        sim.cfg = res.config
        if res.verdict == ACCEPT:
            sim.label = HALT_ACC
        elif res.verdict == REJECT:
            sim.label = HALT_REJ

    def _proceed(self, sim: _Sim, tape, w, f_n: int) -> int:
        """Run a sim until it halts, reaches a comm state or spends f_n silent steps."""
        v1 = self.v1
        steps = 0
        while sim.label is None:
            q = sim.cfg.state
            if q in v1.pub:
                sim.label = WAIT_COIN
                break
            if q in v1.com:
                break
            if steps == f_n:
                sim.label, sim.loop_at = LOOPING, steps
                break
            self._apply(sim, tape, w)
            steps += 1
        return steps

    # -- one trial -------------------------------------------------------

    def run_trial(self, prover: ProverStrategy, w: str, rng=0, cutoff: int = 1_000_000,
                  trial: int = 0, record: bool = False) -> TrialOutcome:
        v1, r = self.v1, self.params.r
        coins = HashCoins(rng, trial) if isinstance(rng, int) else rng
        tape = input_tape(w)
        f_n, g_n = self.params.bounds(v1, len(w))
        start = initial_configuration(v1, w)
        sims = [_Sim(start, bin_r(i, r)) for i in range(2 ** r)]
        blocks = [frozenset(range(len(sims)))]
        public: list[int] = []
        observed: list = []
        log: list[TranscriptEvent] = []
        timer = TickState(self.params.tick.p(len(w)))
        info = {"partitions": [tuple(blocks)], "segments": [], "stages": 0, "ticks": 0}
        steps = 0

        def done(verdict):
            info["labels"] = [s.label for s in sims]
            info["loop_at"] = {i: s.loop_at for i, s in enumerate(sims) if s.loop_at is not None}
            return TrialOutcome(verdict, steps, 0, len(public) + timer.coins_used,
                                tuple(log), info)

        def flip():
            b = coins.flip()
            public.append(b)
            observed.append((PUBLIC_COIN, b))
            if record:
                log.append(TranscriptEvent(PUBLIC_COIN, b, steps))
            return b

        def exchange(message, symbols):
            """Refine by transmitted symbols, ask P2, enforce block consistency."""
            nonlocal blocks
            refined = []
            for blk in blocks:
                groups: dict = {}
                for i in sorted(blk):
                    groups.setdefault(symbols[i], set()).add(i)
                refined.extend(frozenset(g) for g in groups.values())
            blocks = refined
            info["partitions"].append(tuple(blocks))
            observed.append((VERIFIER_WRITE, message))
            reply = prover.respond(w, tuple(public), tuple(observed))
            observed.append((PROVER_WRITE, reply))
            if record:
                log.append(TranscriptEvent(VERIFIER_WRITE, str(message), steps))
                log.append(TranscriptEvent(PROVER_WRITE, str(reply), steps))
            if not isinstance(reply, tuple) or len(reply) != len(sims):
                return None
            for blk in blocks:
                talking = [i for i in blk if symbols[i] is not None]
                if len({reply[i] for i in talking}) > 1:
                    return None
                if any(reply[i] not in v1.comm_alphabet for i in talking):
                    return None
            return reply

        finished = False
        while not finished:
            info["stages"] += 1
            segments = 0
            while True:
                for s in sims:
                    steps += self._proceed(s, tape, w, f_n)
                talking = [i for i, s in enumerate(sims) if s.label is None]
                if not talking:
                    break
                if steps >= cutoff:
                    return done(CUTOFF)
                symbols = [None] * len(sims)
                for i in talking:
                    peek = self._peek(sims[i], tape)
                    symbols[i] = peek[1].comm if peek and peek[1] else None
                reply = exchange(("segment", tuple(symbols)), symbols)
                if reply is None:
                    info["reason"] = "partition violation"
                    return done(REJECT)
                for i in talking:
                    self._apply(sims[i], tape, w, reply=reply[i])
                    steps += 1
                segments += 1
                if segments > g_n:
                    for s in sims:
                        if s.label is None:
                            s.label = LOOPING
                    break
            info["segments"].append(segments)
            waiting = [i for i, s in enumerate(sims) if s.label == WAIT_COIN]
            if not waiting:
                break
            b = flip()
            steps += 1
            symbols = [None] * len(sims)
            for i in waiting:
                peek = self._peek(sims[i], tape, b)
                symbols[i] = peek[1].comm if peek and peek[1] else None
            reply = exchange(("coin", b, tuple(symbols)), symbols)
            if reply is None:
                info["reason"] = "partition violation"
                return done(REJECT)
            for i in waiting:
                sims[i].label = None
                self._apply(sims[i], tape, w, bpub=b, reply=reply[i])
            info["ticks"] += 1
            steps += 1 + timer.p
            finished = tick(timer, coins) == TIMEOUT
            if steps >= cutoff:
                return done(CUTOFF)
        index = 0
        for _ in range(r):
            index = 2 * index + flip()
            steps += 1
        info["selected"] = index
        chosen = sims[index].label
        return done(REJECT if chosen in (HALT_REJ, LOOPING) else ACCEPT)


def build_v2(v1: MachineSpec, params: V2Params) -> V2Composite:
    return V2Composite(v1, params)


def sim_transcripts(transcript: tuple, sims: int) -> list[tuple[tuple, tuple]]:
    """Per-sim (public coins, events) as that sim's own verifier would show them."""
    views: list[tuple[list, list]] = [([], []) for _ in range(sims)]
    pending = None
    for kind, payload in transcript:
        if kind == VERIFIER_WRITE:
            pending = payload
            if payload[0] == "coin":
                for i, sym in enumerate(payload[2]):
                    if sym is not None:
                        views[i][0].append(payload[1])
                        views[i][1].append((PUBLIC_COIN, payload[1]))
            for i, sym in enumerate(pending[-1]):
                if sym is not None:
                    views[i][1].append((VERIFIER_WRITE, sym))
        elif kind == PROVER_WRITE and pending is not None:
            for i, sym in enumerate(pending[-1]):
                if sym is not None:
                    views[i][1].append((PROVER_WRITE, payload[i]))
            pending = None
    return [(tuple(p), tuple(e)) for p, e in views]


def faithful_prover(p1: ProverStrategy, filler: str = "_") -> ProverStrategy:
    """Answers each talking sim exactly as ``p1`` would answer that sim alone."""

    def respond(w, public, transcript):
        message = transcript[-1][1]
        symbols = message[-1]
        views = sim_transcripts(transcript, len(symbols))
        return tuple(p1.respond(w, *views[i]) if sym is not None else filler
                     for i, sym in enumerate(symbols))

    return ProverStrategy(respond, f"faithful[{p1.name}]", p1.role)


def split_prover(answers: dict[int, str], filler: str = "_") -> ProverStrategy:
    """Gives sim i the fixed answer ``answers[i]`` regardless of blocks."""

    def respond(w, public, transcript):
        symbols = transcript[-1][1][-1]
        return tuple(answers.get(i, filler) if s is not None else filler
                     for i, s in enumerate(symbols))

    return ProverStrategy(respond, "split", "adversarial")

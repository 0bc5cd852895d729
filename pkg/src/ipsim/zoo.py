"""Builders for the small hand-made machines shipped in ``machines/``."""
from __future__ import annotations

import random
from itertools import product

from .core import LEFT, RIGHT, KnfaSpec, MachineSpec, Move, TafaSpec


class _Table:
    def __init__(self, sigma, work=("_",), comm=("_",)):
        self.sigma = tuple(sigma)
        self.tape = (LEFT, *sigma, RIGHT)
        self.work = tuple(work)
        self.comm = tuple(comm)
        self.delta: dict = {}
        self.states: list[str] = []

    def add(self, q, s, phi, g, q2, phi2, d_in, d_w, comm=None, pri=None, pub=None):
        for name in (q, q2):
            if name not in self.states:
                self.states.append(name)
        key = (q, s, phi, g, pri, pub)
        if key in self.delta:
            raise ValueError(f"duplicate rule {key}")
        self.delta[key] = Move(q2, phi2, comm, d_in, d_w)

    def spec(self, initial, pri=(), pub=(), com=(), space=None) -> MachineSpec:
        states = [q for q in self.states if q not in ("acc", "rej")] + ["acc", "rej"]
        return MachineSpec(tuple(states), self.sigma, self.work, self.comm, self.delta, initial,
                           pri=frozenset(pri), pub=frozenset(pub), com=frozenset(com), space=space)


def anbn_counter_tm() -> MachineSpec:
    """Log-space TM for {0^m 1^m} counting in blocks of four.

    Work cell 0 holds '$'; cells 1.. hold floor(#zeros / 4) in binary, least
    significant bit first.  Remainders live in the finite control.
    """
    t = _Table("01", work=("_", "0", "1", "$"))
    W = t.work
    t.add("q0", LEFT, "_", "_", "Z0", "$", +1, 0)
    for r in range(4):
        z = f"Z{r}"
        for phi in W:
            if r < 3:
                t.add(z, "0", phi, "_", f"Z{r + 1}", phi, +1, 0)
            else:
                t.add(z, "0", phi, "_", "INC", phi, +1, +1)
            t.add(z, "1", phi, "_", f"O{r}_1", phi, +1, 0)
            t.add(z, RIGHT, phi, "_", f"ZC{r}_0", phi, 0, +1)
            t.add(z, LEFT, phi, "_", "rej", phi, 0, 0)
        for s in range(4):
            o = f"O{r}_{s}"
            for phi in W:
                if s < 3:
                    t.add(o, "1", phi, "_", f"O{r}_{s + 1}", phi, +1, 0)
                else:
                    t.add(o, "1", phi, "_", f"DEC{r}", phi, +1, +1)
                t.add(o, "0", phi, "_", "rej", phi, 0, 0)
                t.add(o, RIGHT, phi, "_", f"ZC{r}_{s}", phi, 0, +1)
                t.add(o, LEFT, phi, "_", "rej", phi, 0, 0)
            zc = f"ZC{r}_{s}"
            for sym in t.tape:
                t.add(zc, sym, "0", "_", zc, "0", 0, +1)
                t.add(zc, sym, "1", "_", "rej", "1", 0, 0)
                t.add(zc, sym, "_", "_", "acc" if r == s else "rej", "_", 0, 0)
                t.add(zc, sym, "$", "_", "rej", "$", 0, 0)
        dec, back = f"DEC{r}", f"BK{r}"
        for sym in t.tape:
            t.add(dec, sym, "0", "_", dec, "1", 0, +1)
            t.add(dec, sym, "1", "_", back, "0", 0, -1)
            t.add(dec, sym, "_", "_", "rej", "_", 0, 0)
            t.add(dec, sym, "$", "_", "rej", "$", 0, 0)
            for phi in ("0", "1", "_"):
                t.add(back, sym, phi, "_", back, phi, 0, -1)
            t.add(back, sym, "$", "_", f"O{r}_0", "$", 0, 0)
    for sym in t.tape:
        t.add("INC", sym, "1", "_", "INC", "0", 0, +1)
        t.add("INC", sym, "0", "_", "BK", "1", 0, -1)
        t.add("INC", sym, "_", "_", "BK", "1", 0, -1)
        t.add("INC", sym, "$", "_", "rej", "$", 0, 0)
        for phi in ("0", "1", "_"):
            t.add("BK", sym, phi, "_", "BK", phi, 0, -1)
        t.add("BK", sym, "$", "_", "Z0", "$", 0, 0)
    return t.spec("q0")


def parity_tm() -> MachineSpec:
    """Accepts binary strings with an even number of 1s; one work cell."""
    t = _Table("01", work=("_", "1"))
    t.add("q0", LEFT, "_", "_", "P", "_", +1, 0)
    for phi, other in (("_", "1"), ("1", "_")):
        t.add("P", "0", phi, "_", "P", phi, +1, 0)
        t.add("P", "1", phi, "_", "P", other, +1, 0)
        t.add("P", LEFT, phi, "_", "rej", phi, 0, 0)
        t.add("P", RIGHT, phi, "_", "acc" if phi == "_" else "rej", phi, 0, 0)
    return t.spec("q0")


def anbn_two_head() -> KnfaSpec:
    """Deterministic 2-head automaton for {0^m 1^m}.

    Head 2 runs over the zeros while head 1 waits, then both advance in
    lockstep reading (0, 1) pairs.
    """
    tape = (LEFT, "0", "1", RIGHT)
    delta: dict = {}
    delta[("q0", (LEFT, LEFT))] = frozenset({("qA", (1, 1))})
    for a in tape:
        if a != LEFT:
            delta[("qA", (a, "0"))] = frozenset({("qA", (0, 1))})
            delta[("qA", (a, "1"))] = frozenset({("qB", (0, 0))})
            delta[("qA", (a, RIGHT))] = frozenset({("qB", (0, 0))})
    delta[("qB", ("0", "1"))] = frozenset({("qB", (1, 1))})
    delta[("qB", ("1", RIGHT))] = frozenset({("acc", (0, 0))})
    delta[("qB", (RIGHT, RIGHT))] = frozenset({("acc", (0, 0))})
    return KnfaSpec(("q0", "qA", "qB", "acc", "rej"), ("0", "1"), 2, delta, "q0")


def _all_sigma_rules(t: _Table, q, q2, d, **kw):
    for s in t.tape:
        t.add(q, s, "_", "_", q2, "_", d, 0, **kw)


def coin_verifier() -> MachineSpec:
    t = _Table("01")
    t.add("q0", LEFT, "_", "_", "rej", "_", 0, 0, pri=0)
    t.add("q0", LEFT, "_", "_", "acc", "_", 0, 0, pri=1)
    return t.spec("q0", pri={"q0"})


def two_coin_verifier() -> MachineSpec:
    """Two sequential private coins, accept iff both come up 1."""
    t = _Table("01")
    t.add("q0", LEFT, "_", "_", "rej", "_", 0, 0, pri=0)
    t.add("q0", LEFT, "_", "_", "q1", "_", 0, 0, pri=1)
    for s in t.tape:
        t.add("q1", s, "_", "_", "rej", "_", 0, 0, pri=0)
        t.add("q1", s, "_", "_", "acc", "_", 0, 0, pri=1)
    return t.spec("q0", pri={"q0", "q1"})


def public_verifier() -> MachineSpec:
    """One public coin at the left end; the prover must echo it.

    Also checks that the input ends in '1' when the coin is 0.
    """
    t = _Table("01", comm=("_", "0", "1"))
    for b in (0, 1):
        t.add("q0", LEFT, "_", "_", f"s{b}", "_", +1, 0, comm="_", pub=b)
    for b in (0, 1):
        s = f"s{b}"
        for g in t.comm:
            for sym in t.tape:
                if sym == RIGHT:
                    ok = g == str(b)
                    t.add(s, sym, "_", g, "acc" if ok else "rej", "_", 0, 0)
                else:
                    t.add(s, sym, "_", g, s, "_", +1, 0)
    return t.spec("q0", pub={"q0"}, com={"q0"})


def mixed_verifier() -> MachineSpec:
    """A state flipping a private and a public coin at once.

    Accepts when the private bit is 1, or when the prover's answer matches
    the public bit.
    """
    t = _Table("0", comm=("_", "a", "b"))
    sym = {0: "a", 1: "b"}
    for bpri in (0, 1):
        for bpub in (0, 1):
            nxt = "acc" if bpri else f"chk{bpub}"
            t.add("q0", LEFT, "_", "_", nxt, "_", 0 if nxt == "acc" else +1, 0,
                  comm="_", pri=bpri, pub=bpub)
    for b in (0, 1):
        for g in t.comm:
            for s in t.tape:
                t.add(f"chk{b}", s, "_", g, "acc" if g == sym[b] else "rej", "_", 0, 0)
    return t.spec("q0", pri={"q0"}, pub={"q0"}, com={"q0"})


def two_public_verifier() -> MachineSpec:
    """Two public coins, one before and one after a scan; prover answers each.

    Accepts iff the first answer equals the second coin.  A blind prover
    can at best guess, so the optimum is 1/2.
    """
    t = _Table("01", comm=("_", "0", "1"))
    for b in (0, 1):
        t.add("q0", LEFT, "_", "_", "scan", "_", +1, 0, comm="_", pub=b)
    for g in t.comm:
        for s in t.tape:
            if s == RIGHT:
                t.add("scan", s, "_", g, f"c{g}", "_", 0, 0)
            else:
                t.add("scan", s, "_", g, "scan", "_", +1, 0)
    for g in t.comm:
        q = f"c{g}"
        for g2 in t.comm:
            for s in t.tape:
                for b in (0, 1):
                    ok = g == str(b)
                    t.add(q, s, "_", g2, "acc" if ok else "rej", "_", 0, 0, comm="_", pub=b)
    pubs = {"q0"} | {f"c{g}" for g in t.comm}
    return t.spec("q0", pub=pubs, com=pubs)


def self_loop_verifier() -> MachineSpec:
    t = _Table("01")
    t.add("q0", LEFT, "_", "_", "loop", "_", 0, 0)
    _all_sigma_rules(t, "loop", "loop", 0)
    return t.spec("q0", space=0)


def one_pass_verifier() -> MachineSpec:
    """Scans left to right once and accepts on the right endmarker."""
    t = _Table("01")
    for s in t.tape:
        t.add("q0", s, "_", "_", "acc" if s == RIGHT else "q0", "_", 0 if s == RIGHT else +1, 0)
    return t.spec("q0", space=0)


def three_state_verifier() -> MachineSpec:
    """Private-coin walk: accept w.p. depending on |w|."""
    t = _Table("01")
    for s in t.tape:
        if s == RIGHT:
            t.add("q0", s, "_", "_", "acc", "_", 0, 0, pri=0)
            t.add("q0", s, "_", "_", "q1", "_", -1, 0, pri=1)
        else:
            t.add("q0", s, "_", "_", "q0", "_", +1, 0, pri=0)
            t.add("q0", s, "_", "_", "q1", "_", +1, 0, pri=1)
        if s == RIGHT:
            t.add("q1", s, "_", "_", "rej", "_", 0, 0)
        else:
            t.add("q1", s, "_", "_", "q0", "_", +1, 0)
    return t.spec("q0", pri={"q0"}, space=0)


def guess_coin_verifier() -> MachineSpec:
    """Private coin b, announce 'x', accept iff the reply is b.  Value 1/2."""
    t = _Table("01", comm=("_", "x", "0", "1"))
    for b in (0, 1):
        t.add("q0", LEFT, "_", "_", f"c{b}", "_", 0, 0, comm="x", pri=b)
    for b in (0, 1):
        for g in t.comm:
            for sym in t.tape:
                t.add(f"c{b}", sym, "_", g, "acc" if g == str(b) else "rej", "_", 0, 0)
    return t.spec("q0", pri={"q0"}, com={"q0"})


def coin_or_loop_verifier() -> MachineSpec:
    """Private coin: 1 accepts, 0 spins in place forever without talking."""
    t = _Table("01")
    t.add("q0", LEFT, "_", "_", "acc", "_", 0, 0, pri=1)
    t.add("q0", LEFT, "_", "_", "spin", "_", 0, 0, pri=0)
    _all_sigma_rules(t, "spin", "spin", 0)
    return t.spec("q0", pri={"q0"})


def bundled_machines() -> dict[str, object]:
    from .transforms.clock import ClockParams, build_poly_clock

    return {
        "coin": coin_verifier(),
        "two_coins": two_coin_verifier(),
        "pub": public_verifier(),
        "mixed": mixed_verifier(),
        "pub2": two_public_verifier(),
        "selfloop": self_loop_verifier(),
        "onepass": one_pass_verifier(),
        "walk3": three_state_verifier(),
        "guess": guess_coin_verifier(),
        "coinloop": coin_or_loop_verifier(),
        "last_symbol": last_symbol_verifier(),
        "even_ones": even_ones_verifier(),
        "anbn_tm": anbn_counter_tm(),
        "parity_tm": parity_tm(),
        "anbn_2head": anbn_two_head(),
        "clock_t1": build_poly_clock(ClockParams(1, 1, 4)),
        "clock_t2": build_poly_clock(ClockParams(2, 1, 4)),
    }


def all_words(alphabet, max_len: int):
    for n in range(max_len + 1):
        for tup in product(alphabet, repeat=n):
            yield "".join(tup)


def last_symbol_verifier() -> MachineSpec:
    """One public coin b at the left end answered by y, then a scan.

    At the right end: b = 0 accepts iff the input ends in '1'; b = 1 accepts
    iff y = '1'.  Acceptance exceeds 1/2 exactly on inputs ending in '1'.
    """
    t = _Table("01", comm=("_", "0", "1"))
    for b in (0, 1):
        t.add("q0", LEFT, "_", "_", f"b{b}x", "_", +1, 0, comm="_", pub=b)
    for b in (0, 1):
        for last in ("x", "0", "1"):
            q = f"b{b}{last}"
            for g in t.comm:
                for s in t.tape:
                    if s == RIGHT:
                        ok = last == "1" if b == 0 else g == "1"
                        t.add(q, s, "_", g, "acc" if ok else "rej", "_", 0, 0)
                    elif s == LEFT:
                        t.add(q, s, "_", g, "rej", "_", 0, 0)
                    else:
                        t.add(q, s, "_", g, f"b{b}{s}", "_", +1, 0)
    return t.spec("q0", pub={"q0"}, com={"q0"}, space=0)


def even_ones_verifier() -> MachineSpec:
    """Two public coins; accepts with probability 3/4 on an even number of 1s.

    Coin b1 at the left end is answered by y1; the scan tracks the parity of
    1s; coin b2 is flipped on the right end.  Accept iff (b1 and even) or
    (b2 and y1 = '1').  With an odd count the best prover reaches exactly 1/2.
    """
    t = _Table("01", comm=("_", "0", "1"))
    for b in (0, 1):
        t.add("q0", LEFT, "_", "_", f"s{b}e", "_", +1, 0, comm="_", pub=b)
    for b in (0, 1):
        for par in "eo":
            q = f"s{b}{par}"
            for g in t.comm:
                for s in t.tape:
                    if s == RIGHT:
                        t.add(q, s, "_", g, f"t{b}{par}{g}", "_", 0, 0)
                    elif s == LEFT:
                        t.add(q, s, "_", g, "rej", "_", 0, 0)
                    else:
                        flip = {"e": "o", "o": "e"}[par] if s == "1" else par
                        t.add(q, s, "_", g, f"s{b}{flip}", "_", +1, 0)
    finals = set()
    for b in (0, 1):
        for par in "eo":
            for y in t.comm:
                q = f"t{b}{par}{y}"
                finals.add(q)
                for g in t.comm:
                    for s in t.tape:
                        for b2 in (0, 1):
                            ok = (b == 1 and par == "e") or (b2 == 1 and y == "1")
                            t.add(q, s, "_", g, "acc" if ok else "rej", "_", 0, 0, comm="_", pub=b2)
    return t.spec("q0", pub={"q0"} | finals, com={"q0"} | finals, space=0)


def random_verifier(rng: random.Random, n_states: int = 3, comm: tuple[str, ...] = ("_",),
                    pri_prob: float = 0.5, pub_prob: float = 0.0) -> MachineSpec:
    """A total constant-space verifier with random transitions.

    Public states always communicate; other states communicate with
    probability 1/2 when ``comm`` has more than the blank.
    """
    t = _Table("01", comm=comm)
    names = [f"q{i}" for i in range(n_states)]
    targets = names + ["acc", "rej"]
    pub = {q for q in names if rng.random() < pub_prob}
    pri = {q for q in names if rng.random() < pri_prob}
    com = set(pub) | {q for q in names if len(comm) > 1 and rng.random() < 0.5}
    for q in names:
        for s in t.tape:
            for g in comm:
                for bpri in ((0, 1) if q in pri else (None,)):
                    for bpub in ((0, 1) if q in pub else (None,)):
                        out = rng.choice(comm) if q in com else None
                        t.add(q, s, "_", g, rng.choice(targets), "_", rng.choice((-1, 0, 1)), 0,
                              comm=out, pri=bpri, pub=bpub)
    for q in targets:
        if q not in t.states:
            t.states.append(q)
    return t.spec("q0", pri=pri, pub=pub, com=com, space=0)


def random_tafa(rng: random.Random, n_states: int = 4, max_moves: int = 2) -> TafaSpec:
    names = [f"a{i}" for i in range(n_states)]
    states = tuple(names + ["acc", "rej"])
    forall = frozenset(q for q in names if rng.random() < 0.5)
    exists = frozenset(q for q in names if q not in forall)
    delta = {}
    for q in names:
        for s in (LEFT, "0", "1", RIGHT):
            k = rng.randint(1, max_moves)
            delta[(q, s)] = frozenset((rng.choice(states), rng.choice((-1, 0, 1))) for _ in range(k))
    return TafaSpec(states, ("0", "1"), exists, forall, delta, "a0")

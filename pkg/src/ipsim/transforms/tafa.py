"""Constant-space public-coin verifiers as two-way alternating automata.

Coin sequences are strings over {0,1}; the empty sequence is ``""`` and is
written ``e`` inside state names.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..core import MachineSpec, TafaSpec

MAX_R = 4


def _antichains(prefix: str, depth: int) -> list[frozenset]:
    """All prefix-free sets of sequences extending ``prefix`` by at most ``depth``."""
    out = [frozenset(), frozenset({prefix})]
    if depth > 0:
        left = _antichains(prefix + "0", depth - 1)
        right = _antichains(prefix + "1", depth - 1)
        out += [a | b for a in left for b in right if a or b]
    return out


def mass(S) -> Fraction:
    return sum((Fraction(1, 2 ** len(x)) for x in S), Fraction(0))


def is_prefix_free(S) -> bool:
    return not any(a != b and b.startswith(a) for a in S for b in S)


@lru_cache(maxsize=None)
def enumerate_maj(r: int, max_r: int = MAX_R) -> frozenset[frozenset[str]]:
    """Prefix-free sets of sequences of length <= r with mass above 1/2."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if r > max_r:
        raise ValueError(f"r={r} is beyond the enumeration budget {max_r}")
    return frozenset(S for S in _antichains("", r) if mass(S) > Fraction(1, 2))


def prefixes(S) -> set[str]:
    return {x[:k] for x in S for k in range(len(x) + 1)}


def proper_prefixes(S) -> set[str]:
    return {x[:k] for x in S for k in range(len(x))}


def _seq(p: str) -> str:
    return p if p else "e"


def set_name(S) -> str:
    return "{" + ",".join(_seq(x) for x in sorted(S, key=lambda x: (len(x), x))) + "}"


def main_state(S, q, g, p) -> str:
    return f"m[{set_name(S)};{q};{g};{_seq(p)}]"


def flip_state(S, q, g, p, b) -> str:
    return f"f[{set_name(S)};{q};{g};{_seq(p)};{b}]"


def check_constpub(v: MachineSpec) -> None:
    if v.pri:
        raise ValueError("2AFA construction: the verifier must not flip private coins")
    blank = v.work_blank
    for m in v.delta.values():
        if m.work != blank or m.d_work != 0:
            raise ValueError("2AFA construction: the verifier must leave its work tape alone")


def constpub_to_2afa(v: MachineSpec, r: int, initial: str = "q0") -> TafaSpec:
    check_constpub(v)
    blank = v.work_blank
    gammas = v.comm_alphabet
    tape = v.tape_alphabet
    halting = {v.accept, v.reject}
    maj = sorted(enumerate_maj(r), key=set_name)
    states = [initial]
    flips: list[str] = []
    forall: set[str] = set()
    delta: dict = {}

    def sim(q, s, g, b=None):
        return v.delta.get((q, s, blank, g, None, b))

    def target(m, S, g, p):
        # halting transitions may step over an endmarker; the 2AFA stays put
        d = 0 if m.state in halting else m.d_in
        return main_state(S, m.state, g, p), d

    delta[(initial, "<")] = frozenset((main_state(S, v.initial, v.comm_blank, ""), 0) for S in maj)
    for s in tape:
        if s != "<":
            delta[(initial, s)] = frozenset({("rej", 0)})
    for S in maj:
        pre, proper = prefixes(S), proper_prefixes(S)
        for p in sorted(pre, key=lambda x: (len(x), x)):
            for q in v.states:
                for g in gammas:
                    name = main_state(S, q, g, p)
                    states.append(name)
                    universal = q in v.pub and p in proper
                    if universal:
                        forall.add(name)
                    for s in tape:
                        if q == v.accept:
                            moves = {("acc", 0)}
                        elif q == v.reject or (q in v.pub and not universal):
                            moves = {("rej", 0)}
                        elif universal:
                            moves = {(flip_state(S, q, g, p, b), 0) for b in "01" if p + b in pre}
                        elif sim(q, s, g) is None:
                            moves = {("rej", 0)}
                        elif q in v.com:
                            m = sim(q, s, g)
                            moves = {target(m, S, g2, p) for g2 in gammas}
                        else:
                            moves = {target(sim(q, s, g), S, g, p)}
                        delta[(name, s)] = frozenset(moves)
        for p in sorted(pre, key=lambda x: (len(x), x)):
            if not p:
                continue
            head, b = p[:-1], p[-1]
            for q in v.states:
                if q not in v.pub:
                    continue
                for g in gammas:
                    name = flip_state(S, q, g, head, b)
                    flips.append(name)
                    for s in tape:
                        m = sim(q, s, g, int(b))
                        if m is None:
                            delta[(name, s)] = frozenset({("rej", 0)})
                        else:
                            delta[(name, s)] = frozenset(target(m, S, g2, p) for g2 in gammas)
    all_states = tuple(states + flips + ["acc", "rej"])
    exists = frozenset(q for q in all_states if q not in forall and q not in ("acc", "rej"))
    return TafaSpec(all_states, v.input_alphabet, exists, frozenset(forall), delta, initial)


def expected_state_count(v: MachineSpec, r: int) -> int:
    maj = enumerate_maj(r)
    qv, g = len(v.states), len(v.comm_alphabet)
    main = sum(qv * g * len(prefixes(S)) for S in maj)
    flip = sum(len(v.pub) * g * (len(prefixes(S)) - 1) for S in maj)
    return 1 + main + flip + 2

"""Replace public coins by private coins announced through the comm cell."""
from __future__ import annotations

from ..core import MachineSpec, Move
from ..engines import PUBLIC_COIN, VERIFIER_WRITE
from ..provers import ProverStrategy


def paired(gamma: str, bit: int) -> str:
    return f"{gamma}:{bit}"


def unpair(symbol: str) -> tuple[str, int] | None:
    head, sep, tail = symbol.rpartition(":")
    if sep and tail in ("0", "1"):
        return head, int(tail)
    return None


def split_state(q: str, bit: int) -> str:
    return f"({q},{bit})"


def privatize_coins(v1: MachineSpec) -> MachineSpec:
    """Every public coin becomes a private coin sent as (γ', b).

    A state flipping both kinds is split: it flips the private coin and moves
    into (q, b1) without touching anything, and (q, b1) flips the emulated
    public coin and performs the original transition.
    """
    gamma1 = v1.comm_alphabet
    gamma2 = gamma1 + tuple(paired(g, b) for g in gamma1 for b in (0, 1))
    extra = [p for p in gamma2 if p not in gamma1]
    both = {q for q in v1.pub if q in v1.pri}
    pub_only = v1.pub - both
    states = list(v1.states)
    for q in v1.states:
        if q in both:
            states[states.index(q):states.index(q) + 1] = [q, split_state(q, 0), split_state(q, 1)]
    pri2 = set(v1.pri) | pub_only | {split_state(q, b) for q in both for b in (0, 1)}
    com2 = (set(v1.com) - both) | {split_state(q, b) for q in both for b in (0, 1)}

    delta: dict = {}

    def reject(q, s, phi, g, bpri, comm):
        delta[(q, s, phi, g, bpri, None)] = Move(v1.reject, phi, comm, 0, 0)

    for (q, s, phi, g, bpri, bpub), m in v1.delta.items():
        if q in both:
            delta[(q, s, phi, g, bpri, None)] = Move(split_state(q, bpri), phi, None, 0, 0)
            delta[(split_state(q, bpri), s, phi, g, bpub, None)] = Move(
                m.state, m.work, paired(m.comm, bpub), m.d_in, m.d_work)
        elif q in pub_only:
            delta[(q, s, phi, g, bpub, None)] = Move(
                m.state, m.work, paired(m.comm, bpub), m.d_in, m.d_work)
        else:
            delta[(q, s, phi, g, bpri, None)] = m
    # a forged paired symbol in the cell is never produced by an honest run
    for (q, s, phi, g, bpri, bpub) in list(v1.delta):
        for x in extra:
            if q in both:
                reject(q, s, phi, x, bpri, None)
                reject(split_state(q, bpri), s, phi, x, bpub, v1.comm_blank)
            elif q in pub_only:
                reject(q, s, phi, x, bpub, v1.comm_blank)
            else:
                reject(q, s, phi, x, bpri, v1.comm_blank if q in com2 else None)
    # (q, b1) is only entered from q with the same readings; the rest is filler
    for q in both:
        for b1 in (0, 1):
            for s in v1.tape_alphabet:
                for phi in v1.work_alphabet:
                    for g in gamma2:
                        for b2 in (0, 1):
                            if (split_state(q, b1), s, phi, g, b2, None) not in delta:
                                reject(split_state(q, b1), s, phi, g, b2, v1.comm_blank)
    return MachineSpec(
        states=tuple(states), input_alphabet=v1.input_alphabet, work_alphabet=v1.work_alphabet,
        comm_alphabet=gamma2, delta=delta, initial=v1.initial, accept=v1.accept,
        reject=v1.reject, pri=frozenset(pri2), pub=frozenset(), com=frozenset(com2),
        space=v1.space,
    )


def to_source_transcript(transcript: tuple) -> tuple[tuple, tuple]:
    """Map events of the privatized run back to (public coins, events) of the source."""
    public, events = [], []
    for kind, payload in transcript:
        if kind == VERIFIER_WRITE:
            split = unpair(payload)
            if split is not None:
                g, b = split
                public.append(b)
                events.append((PUBLIC_COIN, b))
                events.append((VERIFIER_WRITE, g))
                continue
        events.append((kind, payload))
    return tuple(public), tuple(events)


def translate_prover(p1: ProverStrategy) -> ProverStrategy:
    """Prover for the privatized verifier that consults ``p1`` on the source view."""

    def respond(w, public, transcript):
        pub1, tr1 = to_source_transcript(transcript)
        return p1.respond(w, pub1, tr1)

    return ProverStrategy(respond, f"translated[{p1.name}]", p1.role)

"""Worst-case running time of constant-space verifiers over all provers."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from ..core import MachineSpec, input_tape

Node = tuple  # (state, input position, comm symbol)


@dataclass
class WorstCase:
    bounded: bool
    max_steps: int | None = None
    witness: list[Node] | None = None
    word: str | None = None

    def __str__(self):
        if self.bounded:
            return f"bounded <= {self.max_steps}"
        cycle = " -> ".join(f"({q},{p},{g})" for q, p, g in self.witness)
        return f"unbounded on {self.word!r}: {cycle}"


def check_constant_space(v: MachineSpec) -> None:
    blank = v.work_blank
    for m in v.delta.values():
        if m.work != blank or m.d_work != 0:
            raise ValueError("worst-case analysis needs a constant-space verifier")


def successors(v: MachineSpec, tape: tuple, node: Node) -> tuple[list[Node], bool]:
    """Live successors over every coin outcome and prover reply.

    The flag reports whether some branch halts in this step.
    """
    q, pos, g = node
    out: list[Node] = []
    halts = False
    for bpri, bpub in v.coin_bits(q):
        m = v.lookup(q, tape[pos], v.work_blank, g, bpri, bpub)
        p2 = pos + m.d_in
        if m.state in (v.accept, v.reject) or not 0 <= p2 < len(tape):
            halts = True
            continue
        replies = v.comm_alphabet if m.comm is not None else (g,)
        out.extend((m.state, p2, r) for r in replies)
    return out, halts


def _analyze_word(v: MachineSpec, w: str) -> WorstCase:
    tape = input_tape(w)
    start = (v.initial, 0, v.comm_blank)
    graph: dict[Node, list[Node]] = {}
    stack = [start]
    while stack:
        node = stack.pop()
        if node in graph:
            continue
        succ, _ = successors(v, tape, node)
        graph[node] = succ
        stack.extend(s for s in succ if s not in graph)
    # iterative DFS: colour 1 = on stack, 2 = finished
    colour: dict[Node, int] = {}
    longest: dict[Node, int] = {}
    parent: dict[Node, Node] = {}
    work = [(start, 0)]
    colour[start] = 1
    while work:
        node, i = work.pop()
        succ = graph[node]
        if i < len(succ):
            work.append((node, i + 1))
            s = succ[i]
            c = colour.get(s, 0)
            if c == 1:
                cycle = [node]
                while cycle[-1] != s:
                    cycle.append(parent[cycle[-1]])
                return WorstCase(False, witness=cycle[::-1], word=w)
            if c == 0:
                colour[s] = 1
                parent[s] = node
                work.append((s, 0))
        else:
            colour[node] = 2
            longest[node] = 1 + max((longest[s] for s in succ), default=0)
    return WorstCase(True, max_steps=longest[start], word=w)


def analyze_worst_case(v: MachineSpec, n: int) -> WorstCase:
    """Longest run over all inputs of length n, all coins and all provers."""
    check_constant_space(v)
    best: WorstCase | None = None
    for letters in product(v.input_alphabet, repeat=n):
        res = _analyze_word(v, "".join(letters))
        if not res.bounded:
            return res
        if best is None or res.max_steps > best.max_steps:
            best = res
    return best

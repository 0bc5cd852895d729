"""Machine descriptions, validation, configurations and the text format.

Three machine kinds share one line-based format:

* ``verifier`` -- a probabilistic verifier with input tape, work tape and a
  one-symbol communication cell.  Its transition table is split into the six
  cases given by the private-coin / public-coin / communicating role flags.
* ``knfa`` -- a k-head two-way nondeterministic finite automaton.
* ``2afa`` -- a two-way alternating finite automaton.

The left and right endmarkers are spelled ``<`` and ``>``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

LEFT = "<"
RIGHT = ">"
DIRECTIONS = (-1, 0, 1)


class MachineFormatError(ValueError):
    """Raised for malformed machine documents; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MissingTransition(LookupError):
    """A transition lookup failed; the machine is not total where it must be."""


@dataclass(frozen=True)
class Move:
    state: str
    work: str
    comm: str | None
    d_in: int
    d_work: int


# (state, input symbol, work symbol, comm symbol, private bit, public bit)
Key = tuple


@dataclass(frozen=True, eq=True)
class MachineSpec:
    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    work_alphabet: tuple[str, ...]
    comm_alphabet: tuple[str, ...]
    delta: Mapping[Key, Move] = field(hash=False)
    initial: str
    accept: str = "acc"
    reject: str = "rej"
    pri: frozenset = frozenset()
    pub: frozenset = frozenset()
    com: frozenset = frozenset()
    space: int | None = None

    __hash__ = object.__hash__

    @property
    def work_blank(self) -> str:
        return self.work_alphabet[0]

    @property
    def comm_blank(self) -> str:
        return self.comm_alphabet[0]

    @property
    def tape_alphabet(self) -> tuple[str, ...]:
        return (LEFT, *self.input_alphabet, RIGHT)

    def is_halting(self, q: str) -> bool:
        return q == self.accept or q == self.reject

    def case_of(self, q: str) -> str:
        """Name of the Table-1 style case the state falls in."""
        if self.is_halting(q):
            return "halting"
        pri, pub, com = q in self.pri, q in self.pub, q in self.com
        if pri and pub:
            return "Q_pri ∩ Q_pub"
        if pri:
            return "Q_pri ∩ ¬Q_pub ∩ Q_com" if com else "Q_pri ∩ ¬Q_pub ∩ ¬Q_com"
        if pub:
            return "¬Q_pri ∩ Q_pub"
        return "¬Q_pri ∩ ¬Q_pub ∩ Q_com" if com else "¬Q_pri ∩ ¬Q_pub ∩ ¬Q_com"

    def coin_bits(self, q: str) -> list[tuple[int | None, int | None]]:
        pri = (0, 1) if q in self.pri else (None,)
        pub = (0, 1) if q in self.pub else (None,)
        return list(itertools.product(pri, pub))

    def lookup(self, q, sigma, phi, gamma, bpri=None, bpub=None) -> Move:
        try:
            return self.delta[(q, sigma, phi, gamma, bpri, bpub)]
        except KeyError:
            raise MissingTransition(
                f"no transition for {(q, sigma, phi, gamma, bpri, bpub)} "
                f"(case {self.case_of(q)})"
            ) from None


@dataclass(frozen=True)
class KnfaSpec:
    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    heads: int
    delta: Mapping[tuple, frozenset] = field(hash=False)
    initial: str
    accept: str = "acc"
    reject: str = "rej"

    __hash__ = object.__hash__

    def moves(self, q: str, symbols: tuple[str, ...]) -> frozenset:
        return self.delta.get((q, symbols), frozenset())


@dataclass(frozen=True)
class TafaSpec:
    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    exists: frozenset
    forall: frozenset
    delta: Mapping[tuple, frozenset] = field(hash=False)
    initial: str
    accept: str = "acc"
    reject: str = "rej"

    __hash__ = object.__hash__

    def moves(self, q: str, sigma: str) -> frozenset:
        return self.delta.get((q, sigma), frozenset())


@dataclass(frozen=True)
class Configuration:
    """Verifier snapshot.  ``work`` is stored without trailing blanks."""

    state: str
    work: tuple[str, ...]
    comm: str
    input_pos: int
    work_pos: int

    def read_work(self, blank: str) -> str:
        return self.work[self.work_pos] if self.work_pos < len(self.work) else blank

    def write_work(self, symbol: str, blank: str) -> tuple[str, ...]:
        tape = list(self.work)
        if self.work_pos >= len(tape):
            if symbol == blank:
                return self.work
            tape.extend([blank] * (self.work_pos + 1 - len(tape)))
        tape[self.work_pos] = symbol
        while tape and tape[-1] == blank:
            tape.pop()
        return tuple(tape)


@dataclass(frozen=True)
class Violation:
    where: str
    message: str
    case: str = ""

    def __str__(self):
        suffix = f" [transition case: {self.case}]" if self.case else ""
        return f"{self.where}: {self.message}{suffix}"


def input_tape(w: str | Sequence[str]) -> tuple[str, ...]:
    return (LEFT, *tuple(w), RIGHT)


def initial_configuration(spec: MachineSpec, w: str | Sequence[str]) -> Configuration:
    for ch in w:
        if ch not in spec.input_alphabet:
            raise ValueError(f"input symbol {ch!r} is not in the input alphabet")
    return Configuration(spec.initial, (), spec.comm_blank, 0, 0)


def count_configurations(spec: MachineSpec, n: int, s: int) -> int:
    """|Q| (n+2) (s+1) |Phi|^s |Gamma|, exactly."""
    if s < 0:
        raise ValueError("work budget must be non-negative")
    return (
        len(spec.states) * (n + 2) * (s + 1)
        * len(spec.work_alphabet) ** s * len(spec.comm_alphabet)
    )


# ---------------------------------------------------------------------------
# validation

def required_keys(spec: MachineSpec) -> Iterable[Key]:
    """Argument tuples the engines may look up.

    A state entered by some transition can be met with any tape symbol,
    any readable work symbol and any readable comm symbol.  A state that is
    only initial is met solely on the left endmarker with blank cells.
    """
    targets = {m.state for m in spec.delta.values()}
    work_read = [spec.work_blank] + sorted(
        {m.work for m in spec.delta.values()} - {spec.work_blank}
    )
    comm_read = list(spec.comm_alphabet) if spec.com else [spec.comm_blank]
    for q in spec.states:
        if spec.is_halting(q):
            continue
        if q in targets:
            argsets = itertools.product(spec.tape_alphabet, work_read, comm_read)
        elif q == spec.initial:
            argsets = [(LEFT, spec.work_blank, spec.comm_blank)]
        else:
            continue
        for (sigma, phi, gamma) in argsets:
            for bpri, bpub in spec.coin_bits(q):
                yield (q, sigma, phi, gamma, bpri, bpub)


def validate(spec: MachineSpec) -> list[Violation]:
    out: list[Violation] = []
    states = set(spec.states)
    halting = (spec.accept, spec.reject)
    for name, q in (("initial", spec.initial), ("accept", spec.accept), ("reject", spec.reject)):
        if q not in states:
            out.append(Violation(name, f"state {q!r} is not declared"))
    for role, members in (("pri", spec.pri), ("pub", spec.pub), ("com", spec.com)):
        for q in sorted(members - states):
            out.append(Violation(role, f"role lists unknown state {q!r}"))
    for q in sorted(spec.pub - spec.com):
        out.append(Violation(q, "public state must communicate", "Q_pub ⊆ Q_com"))
    for q in halting:
        if q in spec.pri or q in spec.pub:
            out.append(Violation(q, "halting state flips coins", "q_acc, q_rej ∉ Q_pri"))
        if q in spec.com:
            out.append(Violation(q, "halting state communicates", "q_acc, q_rej ∉ Q_com"))
    if not spec.work_alphabet or not spec.comm_alphabet:
        out.append(Violation("alphabet", "work and comm alphabets need a blank"))
        return out

    tape = set(spec.tape_alphabet)
    for key, move in spec.delta.items():
        q, sigma, phi, gamma, bpri, bpub = key
        where = f"δ{key[:4]}"
        case = spec.case_of(q) if q in states else ""
        if q not in states:
            out.append(Violation(where, f"unknown source state {q!r}"))
            continue
        if spec.is_halting(q):
            out.append(Violation(where, "halting state has outgoing transitions", case))
        if sigma not in tape or phi not in spec.work_alphabet or gamma not in spec.comm_alphabet:
            out.append(Violation(where, "unknown symbol in argument tuple", case))
        if (bpri is None) == (q in spec.pri):
            what = "missing" if bpri is None else "unexpected"
            out.append(Violation(where, f"{what} private-bit argument", case))
        if (bpub is None) == (q in spec.pub):
            what = "missing" if bpub is None else "unexpected"
            out.append(Violation(where, f"{what} public-bit argument", case))
        if (move.comm is None) == (q in spec.com):
            what = "missing" if move.comm is None else "unexpected"
            out.append(Violation(where, f"{what} communication write", case))
        if move.state not in states:
            out.append(Violation(where, f"unknown target state {move.state!r}", case))
        if move.work not in spec.work_alphabet:
            out.append(Violation(where, f"unknown work symbol {move.work!r}", case))
        if move.comm is not None and move.comm not in spec.comm_alphabet:
            out.append(Violation(where, f"unknown comm symbol {move.comm!r}", case))
        if move.d_in not in DIRECTIONS or move.d_work not in DIRECTIONS:
            out.append(Violation(where, "head direction outside {-1,0,+1}", case))
        if spec.space == 0 and (move.d_work != 0 or move.work != spec.work_blank):
            out.append(Violation(where, "constant-space machine uses its work tape", case))
    if out:
        return out
    for key in required_keys(spec):
        if key not in spec.delta:
            out.append(Violation(f"δ{key}", "missing transition", spec.case_of(key[0])))
    return out


# ---------------------------------------------------------------------------
# text format

def _fmt_dir(d: int) -> str:
    return "+1" if d == 1 else str(d)


def _parse_dir(tok: str, line: int) -> int:
    try:
        d = int(tok)
    except ValueError:
        raise MachineFormatError(f"bad head direction {tok!r}", line) from None
    if d not in DIRECTIONS:
        raise MachineFormatError(f"bad head direction {tok!r}", line)
    return d


def _parse_bit(tok: str, prefix: str, line: int) -> int:
    val = tok[len(prefix):]
    if val not in ("0", "1"):
        raise MachineFormatError(f"bad coin bit {tok!r}", line)
    return int(val)


_LIST_HEADERS = {"states", "input", "work", "comm", "pri", "pub", "com", "exists", "forall"}
_SCALAR_HEADERS = {"initial", "accept", "reject", "heads", "space"}


def parse_machine(text: str) -> MachineSpec | KnfaSpec | TafaSpec:
    kind = None
    headers: dict[str, object] = {}
    rules: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            rules.append((lineno, line))
            continue
        if rules:
            raise MachineFormatError("header after transitions", lineno)
        if line.startswith("kind"):
            parts = line.split()
            if len(parts) != 2 or parts[1] not in ("verifier", "knfa", "2afa"):
                raise MachineFormatError("kind must be verifier, knfa or 2afa", lineno)
            kind = parts[1]
            continue
        name, sep, rest = line.partition(":")
        name = name.strip()
        if not sep or name not in _LIST_HEADERS | _SCALAR_HEADERS:
            raise MachineFormatError(f"unrecognised line {raw.strip()!r}", lineno)
        if name in headers:
            raise MachineFormatError(f"repeated header {name!r}", lineno)
        if name in _LIST_HEADERS:
            headers[name] = tuple(rest.split())
        else:
            vals = rest.split()
            if len(vals) != 1:
                raise MachineFormatError(f"{name} takes exactly one value", lineno)
            headers[name] = vals[0]
    if kind is None:
        raise MachineFormatError("missing 'kind' line")
    if "initial" not in headers:
        raise MachineFormatError("missing 'initial' header")
    accept = headers.get("accept", "acc")
    reject = headers.get("reject", "rej")
    states = list(headers.get("states", ()))
    if len(set(states)) != len(states):
        raise MachineFormatError("duplicate state names")
    for q in (headers["initial"], accept, reject):
        if q not in states:
            states.append(q)
    states = tuple(states)
    sigma = tuple(headers.get("input", ()))
    for s in sigma:
        if s in (LEFT, RIGHT):
            raise MachineFormatError("endmarkers cannot be input symbols")
    if kind == "verifier":
        return _parse_verifier(headers, rules, states, sigma, accept, reject)
    if kind == "knfa":
        return _parse_knfa(headers, rules, states, sigma, accept, reject)
    return _parse_tafa(headers, rules, states, sigma, accept, reject)


def _check_state(q, states, line):
    if q not in states:
        raise MachineFormatError(f"unknown state {q!r}", line)


def _check_sym(s, alphabet, what, line):
    if s not in alphabet:
        raise MachineFormatError(f"unknown {what} symbol {s!r}", line)


def _parse_verifier(headers, rules, states, sigma, accept, reject) -> MachineSpec:
    work = tuple(headers.get("work", ("_",)))
    comm = tuple(headers.get("comm", ("_",)))
    roles = {}
    for role in ("pri", "pub", "com"):
        members = frozenset(headers.get(role, ()))
        for q in members:
            _check_state(q, states, None)
        roles[role] = members
    bad = roles["pub"] - roles["com"]
    if bad:
        raise MachineFormatError(f"public state must communicate: {sorted(bad)}")
    space = headers.get("space")
    space = int(space) if space is not None else None
    tape = (LEFT, *sigma, RIGHT)
    delta: dict[Key, Move] = {}
    for line, rule in rules:
        lhs, rhs = (part.split() for part in rule.split("->", 1))
        if len(lhs) < 4:
            raise MachineFormatError("transition needs state, input, work and comm symbols", line)
        q, s, phi, gamma = lhs[:4]
        _check_state(q, states, line)
        _check_sym(s, tape, "input", line)
        _check_sym(phi, work, "work", line)
        _check_sym(gamma, comm, "comm", line)
        bpri = bpub = None
        for tok in lhs[4:]:
            if tok.startswith("pri="):
                bpri = _parse_bit(tok, "pri=", line)
            elif tok.startswith("pub="):
                bpub = _parse_bit(tok, "pub=", line)
            else:
                raise MachineFormatError(f"unexpected token {tok!r}", line)
        if (bpri is None) == (q in roles["pri"]):
            raise MachineFormatError(f"private-bit argument does not match role of {q!r}", line)
        if (bpub is None) == (q in roles["pub"]):
            raise MachineFormatError(f"public-bit argument does not match role of {q!r}", line)
        expected = 5 if q in roles["com"] else 4
        if len(rhs) != expected:
            raise MachineFormatError(
                f"transition from {q!r} needs {expected} result fields", line
            )
        q2, phi2 = rhs[0], rhs[1]
        _check_state(q2, states, line)
        _check_sym(phi2, work, "work", line)
        gamma2 = None
        if expected == 5:
            gamma2 = rhs[2]
            _check_sym(gamma2, comm, "comm", line)
        d_in, d_work = _parse_dir(rhs[-2], line), _parse_dir(rhs[-1], line)
        key = (q, s, phi, gamma, bpri, bpub)
        if key in delta:
            raise MachineFormatError(f"duplicate δ entry for {key[:4]}", line)
        delta[key] = Move(q2, phi2, gamma2, d_in, d_work)
    return MachineSpec(
        states=states, input_alphabet=sigma, work_alphabet=work, comm_alphabet=comm,
        delta=delta, initial=headers["initial"], accept=accept, reject=reject,
        pri=roles["pri"], pub=roles["pub"], com=roles["com"], space=space,
    )


def _parse_knfa(headers, rules, states, sigma, accept, reject) -> KnfaSpec:
    k = int(headers.get("heads", 1))
    if k < 1:
        raise MachineFormatError("heads must be at least 1")
    tape = (LEFT, *sigma, RIGHT)
    delta: dict[tuple, set] = {}
    for line, rule in rules:
        lhs, rhs = (part.split() for part in rule.split("->", 1))
        if len(lhs) != k + 1 or len(rhs) != k + 1:
            raise MachineFormatError(f"knfa transition needs {k} symbols and {k} directions", line)
        q, syms = lhs[0], tuple(lhs[1:])
        _check_state(q, states, line)
        _check_state(rhs[0], states, line)
        for s in syms:
            _check_sym(s, tape, "input", line)
        move = (rhs[0], tuple(_parse_dir(d, line) for d in rhs[1:]))
        bucket = delta.setdefault((q, syms), set())
        if move in bucket:
            raise MachineFormatError("duplicate δ entry", line)
        bucket.add(move)
    return KnfaSpec(states, sigma, k, {key: frozenset(v) for key, v in delta.items()},
                    headers["initial"], accept, reject)


def _parse_tafa(headers, rules, states, sigma, accept, reject) -> TafaSpec:
    ex = frozenset(headers.get("exists", ()))
    fa = frozenset(headers.get("forall", ()))
    tape = (LEFT, *sigma, RIGHT)
    delta: dict[tuple, set] = {}
    for line, rule in rules:
        lhs, rhs = (part.split() for part in rule.split("->", 1))
        if len(lhs) != 2 or len(rhs) != 2:
            raise MachineFormatError("2afa transition is 'q s -> q2 d'", line)
        _check_state(lhs[0], states, line)
        _check_state(rhs[0], states, line)
        _check_sym(lhs[1], tape, "input", line)
        move = (rhs[0], _parse_dir(rhs[1], line))
        bucket = delta.setdefault((lhs[0], lhs[1]), set())
        if move in bucket:
            raise MachineFormatError("duplicate δ entry", line)
        bucket.add(move)
    m = TafaSpec(states, sigma, ex, fa, {key: frozenset(v) for key, v in delta.items()},
                 headers["initial"], accept, reject)
    problems = tafa_violations(m)
    if problems:
        raise MachineFormatError("; ".join(problems))
    return m


def tafa_violations(m: TafaSpec) -> list[str]:
    out = []
    halting = {m.accept, m.reject}
    if m.exists & m.forall:
        out.append("existential and universal states overlap")
    if (m.exists | m.forall) & halting:
        out.append("halting state marked existential or universal")
    # unlisted non-halting states default to existential
    if set(m.exists | m.forall) - set(m.states):
        out.append("role lists unknown state")
    for (q, _), moves in m.delta.items():
        if q in halting and moves:
            out.append(f"halting state {q!r} has successors")
    return out


def dump_machine(spec: MachineSpec | KnfaSpec | TafaSpec) -> str:
    if isinstance(spec, MachineSpec):
        return _dump_verifier(spec)
    if isinstance(spec, KnfaSpec):
        return _dump_knfa(spec)
    return _dump_tafa(spec)


def _ordered(members, states):
    return " ".join(q for q in states if q in members)


def _dump_verifier(spec: MachineSpec) -> str:
    lines = [
        "kind verifier",
        "states: " + " ".join(spec.states),
        "input: " + " ".join(spec.input_alphabet),
        "work: " + " ".join(spec.work_alphabet),
        "comm: " + " ".join(spec.comm_alphabet),
        "pri: " + _ordered(spec.pri, spec.states),
        "pub: " + _ordered(spec.pub, spec.states),
        "com: " + _ordered(spec.com, spec.states),
        f"initial: {spec.initial}",
        f"accept: {spec.accept}",
        f"reject: {spec.reject}",
    ]
    if spec.space is not None:
        lines.append(f"space: {spec.space}")
    order = {q: i for i, q in enumerate(spec.states)}
    tape = {s: i for i, s in enumerate(spec.tape_alphabet)}
    work = {s: i for i, s in enumerate(spec.work_alphabet)}
    comm = {s: i for i, s in enumerate(spec.comm_alphabet)}

    def sort_key(key):
        q, s, phi, g, bpri, bpub = key
        return (order[q], tape[s], work[phi], comm[g], bpri or 0, bpub or 0)

    for key in sorted(spec.delta, key=sort_key):
        q, s, phi, g, bpri, bpub = key
        m = spec.delta[key]
        lhs = [q, s, phi, g]
        if bpri is not None:
            lhs.append(f"pri={bpri}")
        if bpub is not None:
            lhs.append(f"pub={bpub}")
        rhs = [m.state, m.work] + ([m.comm] if m.comm is not None else [])
        rhs += [_fmt_dir(m.d_in), _fmt_dir(m.d_work)]
        lines.append(" ".join(lhs) + " -> " + " ".join(rhs))
    return "\n".join(lines) + "\n"


def _dump_knfa(m: KnfaSpec) -> str:
    lines = [
        "kind knfa",
        "states: " + " ".join(m.states),
        "input: " + " ".join(m.input_alphabet),
        f"heads: {m.heads}",
        f"initial: {m.initial}",
        f"accept: {m.accept}",
        f"reject: {m.reject}",
    ]
    for (q, syms) in sorted(m.delta, key=lambda k: (m.states.index(k[0]), k[1])):
        for q2, dirs in sorted(m.delta[(q, syms)]):
            lines.append(f"{q} {' '.join(syms)} -> {q2} {' '.join(map(_fmt_dir, dirs))}")
    return "\n".join(lines) + "\n"


def _dump_tafa(m: TafaSpec) -> str:
    lines = [
        "kind 2afa",
        "states: " + " ".join(m.states),
        "input: " + " ".join(m.input_alphabet),
        "exists: " + _ordered(m.exists, m.states),
        "forall: " + _ordered(m.forall, m.states),
        f"initial: {m.initial}",
        f"accept: {m.accept}",
        f"reject: {m.reject}",
    ]
    for (q, s) in sorted(m.delta, key=lambda k: (m.states.index(k[0]), k[1])):
        for q2, d in sorted(m.delta[(q, s)]):
            lines.append(f"{q} {s} -> {q2} {_fmt_dir(d)}")
    return "\n".join(lines) + "\n"


def load_machine(path) -> MachineSpec | KnfaSpec | TafaSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_machine(fh.read())

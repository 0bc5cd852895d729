"""Command-line entry point: run, transform, analyze, examples."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .core import KnfaSpec, MachineFormatError, MachineSpec, TafaSpec, dump_machine, parse_machine, validate
from .engines import knfa_accepts, tafa_accepts
from .harness import default_workers, monte_carlo, stats_to_csv
from .provers import constant_prover, load_prover


@dataclass
class ExperimentConfig:
    machine: str
    prover: str
    inputs: list[str]
    trials: int
    cutoff: int
    seed: int
    fmt: str
    workers: int


class CliError(Exception):
    pass


def bundled_names() -> list[str]:
    root = resources.files("ipsim") / "machines"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".vm"))


def resolve_machine(name: str):
    path = Path(name)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    else:
        fname = name if name.endswith(".vm") else f"{name}.vm"
        res = resources.files("ipsim") / "machines" / fname
        if not res.is_file():
            raise CliError(f"no such machine file or bundled machine: {name}")
        text = res.read_text(encoding="utf-8")
    try:
        return parse_machine(text)
    except MachineFormatError as exc:
        raise CliError(f"{name}: {exc}") from exc


def parse_prover(text: str):
    if text.startswith("const:"):
        return constant_prover(text[len("const:"):])
    if text.endswith(".json"):
        return load_prover(text)
    raise CliError(f"prover must be const:SYMBOL or a .json script, got {text!r}")


def expand_inputs(single: str | None, sweep: str | None, alphabet) -> list[str]:
    if sweep is None:
        return [single or ""]
    lo, _, hi = sweep.partition(":")
    sym = alphabet[0]
    return [sym * n for n in range(int(lo), int(hi or lo) + 1)]


# -- commands ----------------------------------------------------------------

def cmd_run(args) -> int:
    spec = resolve_machine(args.machine)
    inputs = expand_inputs(args.input, args.lengths, getattr(spec, "input_alphabet", ("0",)))
    if isinstance(spec, (KnfaSpec, TafaSpec)):
        check = knfa_accepts if isinstance(spec, KnfaSpec) else tafa_accepts
        for w in inputs:
            print(json.dumps({"input": w, "accepts": check(spec, w)}))
        return 0
    violations = validate(spec)
    if violations:
        for v in violations:
            print(str(v), file=sys.stderr)
        return 3
    cfg = ExperimentConfig(args.machine, args.prover, inputs, args.trials, args.cutoff, args.seed,
                           args.format, args.workers or default_workers())
    prover = parse_prover(cfg.prover)
    results = [monte_carlo(spec, prover, w, cfg.trials, cfg.cutoff, cfg.seed,
                           workers=cfg.workers, label=w) for w in cfg.inputs]
    if cfg.fmt == "csv":
        sys.stdout.write(stats_to_csv(results))
    else:
        for s in results:
            print(s.to_json())
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_transform(args) -> int:
    from .transforms.clock import ClockParams, build_poly_clock

    name = args.name
    try:
        if name == "clock":
            eps = args.eps
            spec = build_poly_clock(ClockParams(args.t, args.c, args.n0, eps))
            _emit(dump_machine(spec), args.out)
            return 0
        if args.machine is None:
            raise CliError(f"{name} needs --machine")
        src = resolve_machine(args.machine)
        if name == "privatize":
            from .transforms.privatize import privatize_coins

            _emit(dump_machine(privatize_coins(_verifier(src, name))), args.out)
        elif name == "to-2afa":
            from .transforms.tafa import constpub_to_2afa

            _emit(dump_machine(constpub_to_2afa(_verifier(src, name), args.r)), args.out)
        elif name == "hartmanis":
            from .transforms.hartmanis import hartmanis_encode

            enc = hartmanis_encode(_verifier(src, name), args.c)
            _emit(json.dumps({"construction": "hartmanis", "c": args.c, "heads": enc.heads,
                              "source": args.machine}, indent=2) + "\n", args.out)
        elif name == "v2":
            from .transforms.tick import TickParams
            from .transforms.v2 import V2Params, build_v2

            v2 = build_v2(_verifier(src, name), V2Params(args.r, TickParams(args.tick_c, args.tick_t)))
            _emit(json.dumps({**v2.descriptor(), "source": args.machine}, indent=2) + "\n", args.out)
        elif name == "v3":
            from .transforms.v3 import MultiheadVerifier, V3Params, build_v3

            if not isinstance(src, KnfaSpec):
                raise CliError("v3 needs a knfa machine as the simulated multihead verifier")
            mh = MultiheadVerifier.from_knfa(src)
            params = V3Params(mh.heads, args.r, args.m, ClockParams(args.t, args.c, args.n0, args.eps))
            v3 = build_v3(mh, params)
            _emit(json.dumps({**v3.descriptor(), "source": args.machine}, indent=2) + "\n", args.out)
        else:
            raise CliError(f"unknown transformation {name!r}")
    except ValueError as exc:
        raise CliError(f"{name}: precondition violated: {exc}") from exc
    return 0


def _verifier(spec, name) -> MachineSpec:
    if not isinstance(spec, MachineSpec):
        raise CliError(f"{name} needs a verifier machine")
    return spec


def cmd_analyze(args) -> int:
    from .transforms.analyze import analyze_worst_case

    spec = _verifier(resolve_machine(args.machine), "analyze")
    try:
        print(analyze_worst_case(spec, args.n))
    except ValueError as exc:
        raise CliError(f"analyze: {exc}") from exc
    return 0


def cmd_examples(args) -> int:
    for name in bundled_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ipsim", description="Interactive-proof verifier laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo simulation of a machine")
    run.add_argument("--machine", required=True)
    run.add_argument("--input")
    run.add_argument("--lengths", help="sweep lo:hi over inputs made of the first input symbol")
    run.add_argument("--prover", default="const:_")
    run.add_argument("--trials", type=int, default=1000)
    run.add_argument("--cutoff", type=int, default=10_000)
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--workers", type=int)
    run.set_defaults(func=cmd_run)

    tr = sub.add_parser("transform", help="apply a construction")
    tr.add_argument("name", choices=("hartmanis", "clock", "privatize", "to-2afa", "v2", "v3"))
    tr.add_argument("--machine")
    tr.add_argument("--out")
    tr.add_argument("--t", type=int, default=1)
    tr.add_argument("--c", type=int, default=1)
    tr.add_argument("--n0", type=int, default=8)
    tr.add_argument("--eps", type=float)
    tr.add_argument("--r", type=int, default=1)
    tr.add_argument("--m", type=int, default=1)
    tr.add_argument("--tick-c", type=int, default=1)
    tr.add_argument("--tick-t", type=int, default=0)
    tr.set_defaults(func=cmd_transform)

    an = sub.add_parser("analyze", help="worst-case running time over all provers")
    an.add_argument("--machine", required=True)
    an.add_argument("--n", type=int, required=True)
    an.set_defaults(func=cmd_analyze)

    ex = sub.add_parser("examples", help="bundled example machines")
    ex.add_argument("action", choices=("list",))
    ex.set_defaults(func=cmd_examples)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Simulation laboratory for space-bounded interactive proof systems."""
from .core import (
    LEFT, RIGHT, Configuration, KnfaSpec, MachineFormatError, MachineSpec, Move, TafaSpec,
    Violation, count_configurations, dump_machine, initial_configuration, load_machine,
    parse_machine, validate,
)
from .engines import (
    TrialOutcome, TranscriptEvent, exact_acceptance, knfa_accepts, run_trial, tafa_accepts,
    verifier_step,
)
from .provers import ProverStrategy, constant_prover, optimal_bounded_prover, scripted_prover

__all__ = [
    "LEFT", "RIGHT", "Configuration", "KnfaSpec", "MachineFormatError", "MachineSpec", "Move",
    "TafaSpec", "Violation", "count_configurations", "dump_machine", "initial_configuration",
    "load_machine", "parse_machine", "validate", "TrialOutcome", "TranscriptEvent",
    "exact_acceptance", "knfa_accepts", "run_trial", "tafa_accepts", "verifier_step",
    "ProverStrategy", "constant_prover", "optimal_bounded_prover", "scripted_prover",
]

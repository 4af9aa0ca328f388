"""Requirement-guided configuration tuning with a co-evolved auxiliary
performance requirement."""

from .entropy import differential_entropy, kde, silverman_bandwidth
from .ga import GAParams, Member
from .landscape import (
    BudgetExhausted,
    BudgetMeter,
    Landscape,
    OptionSpec,
    load_csv,
    measure,
    satisfiability_fraction,
    synth,
    write_csv,
)
from .requirement import Fragment, Proposition, PropositionError, decode, validate
from .tuners import TunerParams, TunerResult, cotune_run, ga_run, random_run

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted",
    "BudgetMeter",
    "Fragment",
    "GAParams",
    "Landscape",
    "Member",
    "OptionSpec",
    "Proposition",
    "PropositionError",
    "TunerParams",
    "TunerResult",
    "cotune_run",
    "decode",
    "differential_entropy",
    "ga_run",
    "kde",
    "load_csv",
    "measure",
    "random_run",
    "satisfiability_fraction",
    "silverman_bandwidth",
    "synth",
    "validate",
    "write_csv",
]

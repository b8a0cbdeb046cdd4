"""Infeasibility diagnosis for pseudo-Boolean models: conflict cores and IISs."""

from .model import (
    EQ,
    GE,
    LE,
    ContractViolation,
    Literal,
    Model,
    ModelError,
    NormConstraint,
    RawConstraint,
    Variable,
    evaluate,
    normalize,
)
from .modelio import ModelParseError, load_model, read_model, save_model, write_model
from .search import (
    ConflictCore,
    SearchOptions,
    SearchOutcome,
    analyze_conflict,
    extract_conflict_set,
)
from .stats import RunStats

__version__ = "0.1.0"

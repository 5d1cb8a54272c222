"""Resolution and reasoning for SDSI-style linked local name spaces."""
from .core import (
    EMPTY_ASSIGNMENT,
    EMPTY_WORLD,
    FALSE,
    SELF,
    UNBOUNDED,
    And,
    Cert,
    Compound,
    Contains,
    GlobalName,
    Key,
    KeyUniverse,
    LocalName,
    LocalNameAssignment,
    Not,
    Self,
    World,
    disjoin,
    iff,
    implies,
    interpret,
    normalize_left,
)
from .parser import ParseError, parse_expr, parse_formula, parse_witness, parse_world, render
from .semantics import (
    InconsistentAssignment,
    apply_step,
    holds,
    is_consistent,
    minimal_assignment,
    models_closed,
    models_open,
)
from .resolver import ComputationTree, ref2_all, ref2_trace

__all__ = [
    "EMPTY_ASSIGNMENT",
    "EMPTY_WORLD",
    "FALSE",
    "SELF",
    "UNBOUNDED",
    "And",
    "Cert",
    "Compound",
    "ComputationTree",
    "Contains",
    "GlobalName",
    "InconsistentAssignment",
    "Key",
    "KeyUniverse",
    "LocalName",
    "LocalNameAssignment",
    "Not",
    "ParseError",
    "Self",
    "World",
    "apply_step",
    "disjoin",
    "holds",
    "iff",
    "implies",
    "interpret",
    "is_consistent",
    "minimal_assignment",
    "models_closed",
    "models_open",
    "normalize_left",
    "parse_expr",
    "parse_formula",
    "parse_witness",
    "parse_world",
    "ref2_all",
    "ref2_trace",
    "render",
]

"""GF(2) deduction of hidden extensions from fact files."""

from .engine import (
    Constraint, DerivationTrace, InconsistentSystem, Opaque, Representation, Solution, TraceStep,
    compile_constraints, explain, multiply_ansatz, replay, representations, solve,
)
from .facts import (
    Annihilation, Ansatz, BasisDecl, BasisMissingError, CaseSplitError, DegreeDecl, Disjunction, FactParseError,
    FactSystem, Multiply, NonVanishing, ProductRelation, TorsionFree, UnknownDecl, add_fact, invert_tau,
    load_facts, parse_fact, parse_facts,
)
from .terms import ONE, TAU, TWO, UNIT, ZERO, DegreeError, Lin, Monomial, parse_monomial

__all__ = [
    "Annihilation", "Ansatz", "BasisDecl", "BasisMissingError", "CaseSplitError", "Constraint", "DegreeDecl",
    "DegreeError", "DerivationTrace", "Disjunction", "FactParseError", "FactSystem", "InconsistentSystem", "Lin",
    "Monomial", "Multiply", "NonVanishing", "ONE", "Opaque", "ProductRelation", "Representation", "Solution",
    "TAU", "TWO", "TorsionFree", "TraceStep", "UNIT", "UnknownDecl", "ZERO", "add_fact", "compile_constraints",
    "explain", "invert_tau", "load_facts", "multiply_ansatz", "parse_fact", "parse_facts", "parse_monomial",
    "replay", "representations", "solve",
]

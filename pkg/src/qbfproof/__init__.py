"""Checkers and generators for QBF refutations in MRes and QRAT."""

from .formula import Prefix, QbfFormula, existential_subclause, is_tautology, make_clause, parse_qdimacs, write_qdimacs
from .unitprop import AtMode, is_at, propagate

__all__ = [
    "AtMode",
    "Prefix",
    "QbfFormula",
    "existential_subclause",
    "is_at",
    "is_tautology",
    "make_clause",
    "parse_qdimacs",
    "propagate",
    "write_qdimacs",
]

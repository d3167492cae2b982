"""Reasoner for existential rules (TGDs) with equality constraints (EGDs)."""

from dlge._core import (
    Program,
    analyze,
    answer,
    chase,
    chase_dot,
    check_satisfiable,
    load,
    parse,
    validate,
    verify_harmless,
)

__all__ = [
    "Program",
    "analyze",
    "answer",
    "chase",
    "chase_dot",
    "check_satisfiable",
    "load",
    "parse",
    "validate",
    "verify_harmless",
]

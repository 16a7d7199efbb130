"""Satisfiability checking for path conditions and output queries."""

from .core import (
    Backend, Solver, SolverConfig, SolverVerdict, UNKNOWN_VERDICT, UNSAT_VERDICT, Verdict, check_sat, resolve_backend,
)
from .simplify import has_hard_terms, simplify
from .smtlib import BackendUnavailable, find_solver_binary

__all__ = [
    "Backend", "BackendUnavailable", "Solver", "SolverConfig", "SolverVerdict", "UNKNOWN_VERDICT", "UNSAT_VERDICT",
    "Verdict", "check_sat", "find_solver_binary", "has_hard_terms", "resolve_backend", "simplify",
]

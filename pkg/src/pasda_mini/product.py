"""Product unit: both versions on shared inputs, effects compared per path."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from .minilang import ast as A


class CompareMode(str, Enum):
    # error names first, return values only when both versions returned
    ERROR_KIND_THEN_VALUE = "ERROR_KIND_THEN_VALUE"


class SignatureMismatch(ValueError):
    """The two versions differ in arity, parameter types, or return type."""


@dataclass(frozen=True)
class ProductUnit:
    v1: A.FunctionDef
    v2: A.FunctionDef
    shared_params: Tuple[A.Param, ...]
    compare_mode: CompareMode = CompareMode.ERROR_KIND_THEN_VALUE
    # programs supplying callees for inlining; default to the functions alone
    program_v1: Optional[A.Program] = None
    program_v2: Optional[A.Program] = None

    def program(self, side: int) -> A.Program:
        prog = self.program_v1 if side == 1 else self.program_v2
        fn = self.v1 if side == 1 else self.v2
        return prog if prog is not None else A.Program((fn,))


def build_product(v1: A.FunctionDef, v2: A.FunctionDef, program_v1: Optional[A.Program] = None,
                  program_v2: Optional[A.Program] = None) -> ProductUnit:
    """Compose two versions; the shared inputs take v1's parameter names."""
    if len(v1.params) != len(v2.params):
        raise SignatureMismatch(f"arity {len(v1.params)} vs {len(v2.params)}")
    if v1.signature != v2.signature:
        raise SignatureMismatch(f"signature {v1.signature} vs {v2.signature}")
    return ProductUnit(v1, v2, v1.params, CompareMode.ERROR_KIND_THEN_VALUE, program_v1, program_v2)

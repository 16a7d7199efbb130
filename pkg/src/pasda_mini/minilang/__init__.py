"""MiniLang: the small imperative language analyzed by the differ."""

from .ast import INT, REAL, FunctionDef, Param, Program
from .errors import CallCycleError, FuelExhausted, MiniLangError, ParseError, TypeCheckError
from .interpreter import (
    DIV_BY_ZERO,
    Effect,
    EffectKind,
    effects_equal,
    interpret,
    run_with_coverage,
)
from .parser import parse, parse_file
from .printer import pretty_print

__all__ = [
    "INT", "REAL", "FunctionDef", "Param", "Program",
    "CallCycleError", "FuelExhausted", "MiniLangError", "ParseError", "TypeCheckError",
    "DIV_BY_ZERO", "Effect", "EffectKind", "effects_equal", "interpret", "run_with_coverage",
    "parse", "parse_file", "pretty_print",
]

"""Deterministic concrete interpreter.

Semantics: ints are 64-bit two's complement with wrap-around, division
truncates toward zero and ``%`` takes the sign of the dividend.  Reals are
IEEE doubles.  Division or modulo by zero (int or real) raises the
``DivByZero`` effect.  Intrinsics follow C99 ``<math.h>`` conventions for
out-of-domain arguments (NaN / infinities instead of exceptions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Set, Tuple, Union

from . import ast as A
from .errors import FuelExhausted

DEFAULT_FUEL = 10**6
DIV_BY_ZERO = "DivByZero"

Scalar = Union[int, float]


class EffectKind(str, Enum):
    RETURN = "RETURN"
    THROWN = "THROWN"


@dataclass(frozen=True)
class Effect:
    """Observable outcome of a call: a returned value or a raised error name.

    ``value`` may be a concrete scalar or a symbolic term.
    """

    kind: EffectKind
    value: object = None
    error: Optional[str] = None

    def __post_init__(self):
        if self.kind is EffectKind.RETURN and (self.value is None or self.error is not None):
            raise ValueError("RETURN effect needs a value and no error name")
        if self.kind is EffectKind.THROWN and (self.error is None or self.value is not None):
            raise ValueError("THROWN effect needs an error name and no value")

    @classmethod
    def returned(cls, value) -> "Effect":
        return cls(EffectKind.RETURN, value=value)

    @classmethod
    def thrown(cls, error: str) -> "Effect":
        return cls(EffectKind.THROWN, error=error)

    def __str__(self) -> str:
        if self.kind is EffectKind.THROWN:
            return f"throw {self.error}"
        return str(self.value)


def effects_equal(a: Effect, b: Effect) -> bool:
    """Concrete effect equality; NaN equals NaN and -0.0 equals 0.0."""
    if a.kind is not b.kind:
        return False
    if a.kind is EffectKind.THROWN:
        return a.error == b.error
    x, y = a.value, b.value
    if isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y):
        return True
    return x == y


# ---------------------------------------------------------------------------
# Scalar primitives (shared with symbolic constant folding)
# ---------------------------------------------------------------------------


def wrap64(v: int) -> int:
    v &= (1 << 64) - 1
    return v - (1 << 64) if v >= (1 << 63) else v


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def trunc_mod(a: int, b: int) -> int:
    return a - b * trunc_div(a, b)


class _Thrown(Exception):
    def __init__(self, error: str):
        self.error = error


def _safe(fn, *args) -> float:
    try:
        return fn(*args)
    except ValueError:
        return math.nan
    except OverflowError:
        return math.inf


def _log(x: float) -> float:
    if x == 0:
        return -math.inf
    if x < 0 or math.isnan(x):
        return math.nan
    return math.log(x)


def _sqrt(x: float) -> float:
    if x < 0 or math.isnan(x):
        return math.nan
    return math.sqrt(x)


def _pow(x: float, y: float) -> float:
    try:
        return math.pow(x, y)
    except OverflowError:
        return math.inf
    except (ValueError, ZeroDivisionError):
        if x == 0 and y < 0:
            return math.inf
        return math.nan


def apply_intrinsic(name: str, args: Sequence[Scalar], ty: str) -> Scalar:
    if name in ("abs", "min", "max"):
        if ty == A.INT:
            v = {"abs": lambda: abs(args[0]), "min": lambda: min(args), "max": lambda: max(args)}[name]()
            return wrap64(int(v))
        xs = [float(a) for a in args]
        if name == "abs":
            return abs(xs[0])
        if any(math.isnan(x) for x in xs):
            return math.nan
        return min(xs) if name == "min" else max(xs)
    xs = [float(a) for a in args]
    if name == "tan":
        return _safe(math.tan, xs[0])
    if name == "sin":
        return _safe(math.sin, xs[0])
    if name == "cos":
        return _safe(math.cos, xs[0])
    if name == "sqrt":
        return _sqrt(xs[0])
    if name == "log":
        return _log(xs[0])
    if name == "pow":
        return _pow(xs[0], xs[1])
    raise ValueError(f"unknown intrinsic {name}")


def arith(op: str, a: Scalar, b: Scalar, ty: str) -> Scalar:
    """Binary arithmetic with MiniLang semantics; raises ZeroDivisionError on /0."""
    if ty == A.INT:
        a, b = int(a), int(b)
        if op == "+":
            return wrap64(a + b)
        if op == "-":
            return wrap64(a - b)
        if op == "*":
            return wrap64(a * b)
        if b == 0:
            raise ZeroDivisionError
        if op == "/":
            return wrap64(trunc_div(a, b))
        if op == "%":
            return wrap64(trunc_mod(a, b))
    else:
        a, b = float(a), float(b)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if b == 0:
            raise ZeroDivisionError
        if op == "/":
            return a / b
        if op == "%":
            return math.fmod(a, b)
    raise ValueError(f"unknown operator {op}")


def compare(op: str, a: Scalar, b: Scalar) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    raise ValueError(op)


def coerce(value: Scalar, ty: str) -> Scalar:
    return float(value) if ty == A.REAL else value


# ---------------------------------------------------------------------------
# Interpreter
# ---------------------------------------------------------------------------


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class Interpreter:
    """Tree-walking interpreter.  ``lines`` collects executed statement lines."""

    def __init__(self, program: A.Program, fuel: int = DEFAULT_FUEL, uif_tables=None):
        self.program = program
        self.fuel = fuel
        self.lines: Set[int] = set()
        # (name, args) -> value, for abstracted functions under test
        self.uif_tables = uif_tables if uif_tables is not None else {}

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("step budget exhausted")

    def call(self, fn: A.FunctionDef, args: Sequence[Scalar]) -> Effect:
        try:
            return Effect.returned(self.invoke(fn, args))
        except _Thrown as t:
            return Effect.thrown(t.error)

    def invoke(self, fn: A.FunctionDef, args: Sequence[Scalar]) -> Scalar:
        env: Dict[str, Scalar] = {p.name: coerce(a, p.ty) for p, a in zip(fn.params, args)}
        try:
            self.block(fn.body, env)
        except _Return as r:
            return coerce(r.value, fn.ret)
        raise AssertionError("checked function fell off its end")

    def block(self, stmts, env):
        # block-local declarations disappear at block exit
        outer = set(env)
        try:
            for s in stmts:
                self.stmt(s, env)
        finally:
            for name in list(env):
                if name not in outer:
                    del env[name]

    def stmt(self, s: A.Stmt, env):
        self.tick()
        self.lines.add(s.line)
        if isinstance(s, A.Let):
            env[s.name] = coerce(self.expr(s.value, env), s.ty)
        elif isinstance(s, A.Assign):
            value = self.expr(s.value, env)
            if s.op != "=":
                value = self.arith(s.op[0], env[s.name], value, A.join_types(s.ty, _ty(value)))
            env[s.name] = coerce(value, s.ty)
        elif isinstance(s, A.If):
            if self.cond(s.cond, env):
                self.block(s.then, env)
            else:
                self.block(s.other, env)
        elif isinstance(s, A.While):
            while self.cond(s.cond, env):
                self.tick()
                self.block(s.body, env)
                self.lines.add(s.line)
        elif isinstance(s, A.For):
            outer = set(env)
            try:
                if s.init is not None:
                    self.stmt(s.init, env)
                while self.cond(s.cond, env):
                    self.tick()
                    self.block(s.body, env)
                    if s.update is not None:
                        self.stmt(s.update, env)
                    self.lines.add(s.line)
            finally:
                for name in list(env):
                    if name not in outer:
                        del env[name]
        elif isinstance(s, A.Return):
            raise _Return(self.expr(s.value, env))
        elif isinstance(s, A.Fail):
            raise _Thrown(s.error)
        else:
            raise TypeError(f"unknown statement {s!r}")

    def arith(self, op, a, b, ty):
        try:
            return arith(op, a, b, ty)
        except ZeroDivisionError:
            raise _Thrown(DIV_BY_ZERO) from None

    def cond(self, e: A.Expr, env) -> bool:
        return bool(self.expr(e, env))

    def expr(self, e: A.Expr, env):
        if isinstance(e, (A.IntLit, A.RealLit, A.BoolLit)):
            return e.value
        if isinstance(e, A.Var):
            return env[e.name]
        if isinstance(e, A.Unary):
            v = self.expr(e.operand, env)
            if e.op == "!":
                return not v
            return wrap64(-v) if e.ty == A.INT else -v
        if isinstance(e, A.Binary):
            if e.op == "&&":
                return self.cond(e.left, env) and self.cond(e.right, env)
            if e.op == "||":
                return self.cond(e.left, env) or self.cond(e.right, env)
            a = self.expr(e.left, env)
            b = self.expr(e.right, env)
            if e.op in A.CMP_OPS:
                return compare(e.op, a, b)
            return self.arith(e.op, a, b, e.ty)
        if isinstance(e, A.Ternary):
            v = self.expr(e.then, env) if self.cond(e.cond, env) else self.expr(e.other, env)
            return coerce(v, e.ty)
        if isinstance(e, A.Call):
            args = [self.expr(a, env) for a in e.args]
            if e.intrinsic:
                return apply_intrinsic(e.name, args, e.ty)
            return self.invoke(self.program[e.name], args)
        if isinstance(e, A.UifApp):
            args = tuple(self.expr(a, env) for a in e.args)
            return coerce(self.uif_tables.get((e.name, args), 0), e.ty)
        raise TypeError(f"unknown expression {e!r}")


def _ty(v) -> str:
    return A.REAL if isinstance(v, float) else A.INT


def interpret(fn: A.FunctionDef, inputs: Sequence[Scalar], program: Optional[A.Program] = None,
              fuel: int = DEFAULT_FUEL) -> Effect:
    """Run ``fn`` on concrete ``inputs`` and return its effect."""
    effect, _ = run_with_coverage(fn, inputs, program, fuel)
    return effect


def run_with_coverage(fn: A.FunctionDef, inputs: Sequence[Scalar], program: Optional[A.Program] = None,
                      fuel: int = DEFAULT_FUEL) -> Tuple[Effect, Tuple[int, ...]]:
    if len(inputs) != len(fn.params):
        raise ValueError(f"{fn.name} expects {len(fn.params)} input(s), got {len(inputs)}")
    for p, v in zip(fn.params, inputs):
        if p.ty == A.INT and not isinstance(v, int):
            raise TypeError(f"parameter {p.name!r} expects int, got {v!r}")
    if program is None:
        program = A.Program((fn,))
    interp = Interpreter(program, fuel)
    effect = interp.call(fn, inputs)
    return effect, tuple(sorted(interp.lines))

"""Typed AST for MiniLang.

Every node is a frozen dataclass.  Source line numbers are carried on
statements (and on expressions, for diagnostics) but are excluded from
equality, so two parses of the same program compare equal even when the
layout differs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

INT = "int"
REAL = "real"
SCALAR_TYPES = (INT, REAL)


def join_types(a: str, b: str) -> str:
    return REAL if REAL in (a, b) else INT


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    ty: Optional[str] = INT
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RealLit:
    value: float
    text: str = field(default="", compare=False)
    ty: Optional[str] = REAL
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    ty: Optional[str] = "bool"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    ty: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # '-' or '!'
    operand: "Expr"
    ty: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / % < <= > >= == != && ||
    left: "Expr"
    right: "Expr"
    ty: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    ty: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    """Intrinsic or user-function call; ``intrinsic`` is set by the checker."""

    name: str
    args: Tuple["Expr", ...]
    intrinsic: bool = False
    ty: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class UifApp:
    """Application of an uninterpreted function introduced by abstraction."""

    name: str
    args: Tuple["Expr", ...]
    ty: Optional[str] = None
    line: int = field(default=0, compare=False)


Expr = Union[IntLit, RealLit, BoolLit, Var, Unary, Binary, Ternary, Call, UifApp]

ARITH_OPS = ("+", "-", "*", "/", "%")
CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")
BOOL_OPS = ("&&", "||")


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    declared: Optional[str] = None  # explicit type annotation, if any
    ty: Optional[str] = None  # resolved variable type
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assign:
    """``name op value`` where op is ``=`` or a compound operator like ``+=``."""

    name: str
    op: str
    value: Expr
    ty: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Tuple["Stmt", ...]
    other: Tuple["Stmt", ...] = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Tuple["Stmt", ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class For:
    init: Optional["Stmt"]
    cond: Expr
    update: Optional["Stmt"]
    body: Tuple["Stmt", ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Return:
    value: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Fail:
    error: str
    line: int = field(default=0, compare=False)


Stmt = Union[Let, Assign, If, While, For, Return, Fail]


@dataclass(frozen=True)
class Param:
    name: str
    ty: str


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: Tuple[Param, ...]
    ret: str
    body: Tuple[Stmt, ...]
    line: int = field(default=0, compare=False)

    @property
    def signature(self) -> Tuple[Tuple[str, ...], str]:
        return tuple(p.ty for p in self.params), self.ret


@dataclass(frozen=True)
class Program:
    functions: Tuple[FunctionDef, ...]

    def __getitem__(self, name: str) -> FunctionDef:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(fn.name == name for fn in self.functions)

    def names(self) -> Tuple[str, ...]:
        return tuple(fn.name for fn in self.functions)


def child_blocks(stmt: Stmt) -> Tuple[Tuple[Stmt, ...], ...]:
    if isinstance(stmt, If):
        return (stmt.then, stmt.other)
    if isinstance(stmt, (While, For)):
        return (stmt.body,)
    return ()


def walk_stmts(stmts: Tuple[Stmt, ...]):
    """Yield every statement in ``stmts`` in pre-order, including for-loop parts."""
    for s in stmts:
        yield s
        if isinstance(s, For):
            if s.init is not None:
                yield s.init
            if s.update is not None:
                yield s.update
        for block in child_blocks(s):
            yield from walk_stmts(block)


def walk_expr(e: Expr):
    yield e
    if isinstance(e, Unary):
        yield from walk_expr(e.operand)
    elif isinstance(e, Binary):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, Ternary):
        yield from walk_expr(e.cond)
        yield from walk_expr(e.then)
        yield from walk_expr(e.other)
    elif isinstance(e, (Call, UifApp)):
        for a in e.args:
            yield from walk_expr(a)


def stmt_exprs(s: Stmt) -> Tuple[Expr, ...]:
    if isinstance(s, (Let, Assign, Return)):
        return (s.value,)
    if isinstance(s, (If, While)):
        return (s.cond,)
    if isinstance(s, For):
        return (s.cond,)
    return ()

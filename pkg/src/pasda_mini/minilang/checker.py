"""Name resolution and type checking.

Produces a new AST in which every expression carries its type and every
assignment carries the type of its target.  ``int`` values widen to
``real`` at assignment, argument passing, and return; narrowing is an error.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Dict, List, Optional, Tuple

from . import ast as A
from .errors import CallCycleError, ParseError, TypeCheckError

BOOL = "bool"
INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

# name -> (arity, result rule); "real" always yields real, "same" joins the args
INTRINSICS = {
    "tan": (1, "real"),
    "sin": (1, "real"),
    "cos": (1, "real"),
    "sqrt": (1, "real"),
    "log": (1, "real"),
    "pow": (2, "real"),
    "abs": (1, "same"),
    "min": (2, "same"),
    "max": (2, "same"),
}


def assignable(target: str, value: str) -> bool:
    return target == value or (target == A.REAL and value == A.INT)


class _Scope:
    def __init__(self, parent: Optional["_Scope"] = None):
        self.parent = parent
        self.vars: Dict[str, str] = {}

    def lookup(self, name: str) -> Optional[str]:
        s = self
        while s is not None:
            if name in s.vars:
                return s.vars[name]
            s = s.parent
        return None


class Checker:
    def __init__(self, program: A.Program):
        self.program = program
        self.sigs: Dict[str, A.FunctionDef] = {}
        for fn in program.functions:
            if fn.name in self.sigs:
                raise TypeCheckError(f"duplicate function {fn.name!r}", fn.line)
            if fn.name in INTRINSICS:
                raise TypeCheckError(f"function {fn.name!r} shadows an intrinsic", fn.line)
            self.sigs[fn.name] = fn
        self.calls: Dict[str, set] = {}
        self.current: Optional[A.FunctionDef] = None

    def run(self) -> A.Program:
        fns = tuple(self.function(fn) for fn in self.program.functions)
        self.check_cycles()
        return A.Program(fns)

    # -- declarations --------------------------------------------------------

    def function(self, fn: A.FunctionDef) -> A.FunctionDef:
        self.current = fn
        self.calls[fn.name] = set()
        scope = _Scope()
        for p in fn.params:
            if p.name in scope.vars:
                raise TypeCheckError(f"duplicate parameter {p.name!r}", fn.line)
            scope.vars[p.name] = p.ty
        body = self.block(fn.body, scope)
        if not always_exits(body):
            raise TypeCheckError(f"function {fn.name!r} can finish without return or fail", fn.line)
        return replace(fn, body=body)

    def check_cycles(self):
        state: Dict[str, int] = {}
        stack: List[str] = []

        def visit(name: str):
            state[name] = 1
            stack.append(name)
            for callee in sorted(self.calls.get(name, ())):
                if state.get(callee) == 1:
                    raise CallCycleError(stack[stack.index(callee):] + [callee])
                if callee not in state:
                    visit(callee)
            stack.pop()
            state[name] = 2

        for name in self.calls:
            if name not in state:
                visit(name)

    # -- statements ----------------------------------------------------------

    def block(self, stmts, scope: _Scope) -> Tuple[A.Stmt, ...]:
        inner = _Scope(scope)
        return tuple(self.stmt(s, inner) for s in stmts)

    def declare(self, name: str, ty: str, scope: _Scope, line: int):
        if scope.lookup(name) is not None:
            raise TypeCheckError(f"variable {name!r} is already defined", line)
        scope.vars[name] = ty

    def stmt(self, s: A.Stmt, scope: _Scope) -> A.Stmt:
        if isinstance(s, A.Let):
            value = self.expr(s.value, scope)
            self.scalar(value, s.line)
            ty = s.declared or value.ty
            if not assignable(ty, value.ty):
                raise TypeCheckError(f"cannot assign {value.ty} to {ty} variable {s.name!r}", s.line)
            self.declare(s.name, ty, scope, s.line)
            return replace(s, value=value, ty=ty)
        if isinstance(s, A.Assign):
            ty = scope.lookup(s.name)
            if ty is None:
                raise ParseError(f"unresolved identifier {s.name!r}", s.line)
            value = self.expr(s.value, scope)
            self.scalar(value, s.line)
            if s.op == "%=" and (ty != A.INT or value.ty != A.INT):
                raise TypeCheckError("'%' requires int operands", s.line)
            if not assignable(ty, value.ty):
                raise TypeCheckError(f"cannot assign {value.ty} to {ty} variable {s.name!r}", s.line)
            return replace(s, value=value, ty=ty)
        if isinstance(s, A.If):
            cond = self.cond(s.cond, scope)
            return replace(s, cond=cond, then=self.block(s.then, scope), other=self.block(s.other, scope))
        if isinstance(s, A.While):
            cond = self.cond(s.cond, scope)
            return replace(s, cond=cond, body=self.block(s.body, scope))
        if isinstance(s, A.For):
            inner = _Scope(scope)
            init = self.stmt(s.init, inner) if s.init is not None else None
            cond = self.cond(s.cond, inner)
            update = self.stmt(s.update, inner) if s.update is not None else None
            return replace(s, init=init, cond=cond, update=update, body=self.block(s.body, inner))
        if isinstance(s, A.Return):
            value = self.expr(s.value, scope)
            self.scalar(value, s.line)
            if not assignable(self.current.ret, value.ty):
                raise TypeCheckError(f"cannot return {value.ty} from {self.current.ret} function", s.line)
            return replace(s, value=value)
        if isinstance(s, A.Fail):
            return s
        raise TypeCheckError(f"unknown statement {s!r}")

    # -- expressions ---------------------------------------------------------

    def scalar(self, e: A.Expr, line: int):
        if e.ty not in A.SCALAR_TYPES:
            raise TypeCheckError(f"expected int or real, found {e.ty}", line)

    def cond(self, e: A.Expr, scope: _Scope) -> A.Expr:
        e = self.expr(e, scope)
        if e.ty != BOOL:
            raise TypeCheckError(f"condition must be boolean, found {e.ty}", e.line)
        return e

    def expr(self, e: A.Expr, scope: _Scope) -> A.Expr:
        if isinstance(e, A.IntLit):
            if not INT_MIN <= e.value <= INT_MAX:
                raise TypeCheckError(f"integer literal {e.value} out of range", e.line)
            return e
        if isinstance(e, (A.RealLit, A.BoolLit)):
            return e
        if isinstance(e, A.Var):
            ty = scope.lookup(e.name)
            if ty is None:
                raise ParseError(f"unresolved identifier {e.name!r}", e.line)
            return replace(e, ty=ty)
        if isinstance(e, A.Unary):
            operand = self.expr(e.operand, scope)
            if e.op == "!":
                if operand.ty != BOOL:
                    raise TypeCheckError("'!' requires a boolean operand", e.line)
                return replace(e, operand=operand, ty=BOOL)
            self.scalar(operand, e.line)
            return replace(e, operand=operand, ty=operand.ty)
        if isinstance(e, A.Binary):
            left = self.expr(e.left, scope)
            right = self.expr(e.right, scope)
            if e.op in A.BOOL_OPS:
                if left.ty != BOOL or right.ty != BOOL:
                    raise TypeCheckError(f"{e.op!r} requires boolean operands", e.line)
                ty = BOOL
            else:
                self.scalar(left, e.line)
                self.scalar(right, e.line)
                if e.op == "%" and (left.ty != A.INT or right.ty != A.INT):
                    raise TypeCheckError("'%' requires int operands", e.line)
                ty = BOOL if e.op in A.CMP_OPS else A.join_types(left.ty, right.ty)
            return replace(e, left=left, right=right, ty=ty)
        if isinstance(e, A.Ternary):
            cond = self.cond(e.cond, scope)
            then = self.expr(e.then, scope)
            other = self.expr(e.other, scope)
            self.scalar(then, e.line)
            self.scalar(other, e.line)
            return replace(e, cond=cond, then=then, other=other, ty=A.join_types(then.ty, other.ty))
        if isinstance(e, A.Call):
            args = tuple(self.expr(a, scope) for a in e.args)
            for a in args:
                self.scalar(a, e.line)
            if e.name in INTRINSICS:
                arity, rule = INTRINSICS[e.name]
                if len(args) != arity:
                    raise TypeCheckError(f"{e.name} expects {arity} argument(s)", e.line)
                if rule == "real":
                    ty = A.REAL
                else:
                    ty = A.INT if all(a.ty == A.INT for a in args) else A.REAL
                return replace(e, args=args, intrinsic=True, ty=ty)
            fn = self.sigs.get(e.name)
            if fn is None:
                raise ParseError(f"unresolved function {e.name!r}", e.line)
            if len(args) != len(fn.params):
                raise TypeCheckError(f"{e.name} expects {len(fn.params)} argument(s)", e.line)
            for a, p in zip(args, fn.params):
                if not assignable(p.ty, a.ty):
                    raise TypeCheckError(f"cannot pass {a.ty} as {p.ty} parameter {p.name!r}", e.line)
            self.calls[self.current.name].add(e.name)
            return replace(e, args=args, intrinsic=False, ty=fn.ret)
        if isinstance(e, A.UifApp):
            args = tuple(self.expr(a, scope) for a in e.args)
            return replace(e, args=args)
        raise TypeCheckError(f"unknown expression {e!r}")


def always_exits(stmts) -> bool:
    """True when every path through ``stmts`` ends in ``return`` or ``fail``."""
    for s in stmts:
        if isinstance(s, (A.Return, A.Fail)):
            return True
        if isinstance(s, A.If) and always_exits(s.then) and always_exits(s.other):
            return True
    return False


def check_program(program: A.Program) -> A.Program:
    return Checker(program).run()

"""Canonical source rendering.

The printed form is what statement matching compares, so it is
deliberately layout-independent: one statement per line, minimal
parentheses, single spaces around binary operators.
"""

from __future__ import annotations

from typing import List

from . import ast as A

_PREC = {
    "||": 1, "&&": 2, "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "%": 6,
}
_TERNARY = 0
_UNARY = 7
_ATOM = 8


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.Binary):
        return _PREC[e.op]
    if isinstance(e, A.Ternary):
        return _TERNARY
    if isinstance(e, A.Unary):
        return _UNARY
    if isinstance(e, (A.IntLit, A.RealLit)) and e.value < 0:
        return _UNARY
    return _ATOM


def _real_text(e: A.RealLit) -> str:
    if e.text:
        return e.text
    r = repr(float(e.value))
    return r if ("." in r or "e" in r or "n" in r) else r + ".0"


def expr_str(e: A.Expr) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.RealLit):
        return _real_text(e)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Unary):
        inner = expr_str(e.operand)
        if _prec(e.operand) < _UNARY:
            inner = f"({inner})"
        # keep "- -1" from collapsing into the literal "--1"
        sep = " " if inner.startswith("-") else ""
        return f"{e.op}{sep}{inner}"
    if isinstance(e, A.Binary):
        p = _PREC[e.op]
        left = expr_str(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = expr_str(e.right)
        # binary operators are left-associative: equal precedence on the right needs parens
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    if isinstance(e, A.Ternary):
        cond = expr_str(e.cond)
        if _prec(e.cond) <= _TERNARY:
            cond = f"({cond})"
        return f"{cond} ? {expr_str(e.then)} : {expr_str(e.other)}"
    if isinstance(e, (A.Call, A.UifApp)):
        return f"{e.name}({', '.join(expr_str(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def simple_stmt_str(s: A.Stmt) -> str:
    if isinstance(s, A.Let):
        ann = f": {s.declared}" if s.declared else ""
        return f"let {s.name}{ann} = {expr_str(s.value)}"
    if isinstance(s, A.Assign):
        return f"{s.name} {s.op} {expr_str(s.value)}"
    if isinstance(s, A.Return):
        return f"return {expr_str(s.value)}"
    if isinstance(s, A.Fail):
        return f"fail {s.error}"
    raise TypeError(f"not a simple statement: {s!r}")


def header_str(s: A.Stmt) -> str:
    """The part of a compound statement that precedes its body."""
    if isinstance(s, A.If):
        return f"if ({expr_str(s.cond)})"
    if isinstance(s, A.While):
        return f"while ({expr_str(s.cond)})"
    if isinstance(s, A.For):
        init = simple_stmt_str(s.init) if s.init is not None else ""
        update = simple_stmt_str(s.update) if s.update is not None else ""
        return f"for ({init}; {expr_str(s.cond)}; {update})"
    return simple_stmt_str(s)


def _block_lines(stmts, indent: int) -> List[str]:
    out: List[str] = []
    for s in stmts:
        out.extend(_stmt_lines(s, indent))
    return out


def _stmt_lines(s: A.Stmt, indent: int) -> List[str]:
    pad = "    " * indent
    if isinstance(s, A.If):
        lines = [f"{pad}{header_str(s)} {{"]
        lines += _block_lines(s.then, indent + 1)
        if s.other:
            if len(s.other) == 1 and isinstance(s.other[0], A.If):
                nested = _stmt_lines(s.other[0], indent)
                lines.append(f"{pad}}} else {nested[0].lstrip()}")
                lines += nested[1:]
                return lines
            lines.append(f"{pad}}} else {{")
            lines += _block_lines(s.other, indent + 1)
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, (A.While, A.For)):
        return [f"{pad}{header_str(s)} {{"] + _block_lines(s.body, indent + 1) + [f"{pad}}}"]
    return [f"{pad}{simple_stmt_str(s)};"]


def stmt_str(s: A.Stmt) -> str:
    """Single-line normalized text of a statement, including nested bodies."""
    return " ".join(line.strip() for line in _stmt_lines(s, 0))


def function_str(fn: A.FunctionDef) -> str:
    params = ", ".join(f"{p.name}: {p.ty}" for p in fn.params)
    lines = [f"fn {fn.name}({params}) -> {fn.ret} {{"]
    lines += _block_lines(fn.body, 1)
    lines.append("}")
    return "\n".join(lines)


def pretty_print(program) -> str:
    if isinstance(program, A.FunctionDef):
        return function_str(program) + "\n"
    return "\n\n".join(function_str(fn) for fn in program.functions) + "\n"

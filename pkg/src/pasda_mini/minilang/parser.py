"""Tokenizer and recursive-descent parser for MiniLang.

    fn <name>(<p>: <type>, ...) -> <type> { <stmts> }

Statements may be terminated by ``;`` but the terminator is optional, so
``{ return x }`` is valid.  ``//`` starts a line comment.
"""

from __future__ import annotations

import re
from typing import List, Optional, Tuple

from . import ast as A
from .errors import ParseError

KEYWORDS = {
    "fn", "let", "if", "else", "while", "for", "return", "fail",
    "true", "false", "int", "real",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>->|\+\+|--|\+=|-=|\*=|/=|%=|<=|>=|==|!=|&&|\|\||[-+*/%<>=!(){},:;?])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_COMPOUND = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%"}


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return t

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def error(self, msg: str):
        raise ParseError(msg, self.tok.line, self.tok.col)

    # -- declarations --------------------------------------------------------

    def program(self) -> A.Program:
        fns = []
        while self.tok.kind != "eof":
            fns.append(self.function())
        return A.Program(tuple(fns))

    def type_name(self) -> str:
        t = self.tok
        if t.kind == "kw" and t.text in A.SCALAR_TYPES:
            self.i += 1
            return t.text
        self.error(f"expected type, found {t.text!r}")

    def function(self) -> A.FunctionDef:
        start = self.expect("fn")
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                pname = self.ident().text
                self.expect(":")
                params.append(A.Param(pname, self.type_name()))
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect("->")
        ret = self.type_name()
        body = self.block()
        return A.FunctionDef(name, tuple(params), ret, body, line=start.line)

    def block(self) -> Tuple[A.Stmt, ...]:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            if self.accept(";"):
                continue
            stmts.append(self.statement())
        self.expect("}")
        return tuple(stmts)

    # -- statements ----------------------------------------------------------

    def statement(self) -> A.Stmt:
        t = self.tok
        if self.at("let"):
            s = self.let()
        elif self.at("if"):
            return self.if_stmt()
        elif self.at("while"):
            self.i += 1
            cond = self.expr()
            return A.While(cond, self.block(), line=t.line)
        elif self.at("for"):
            return self.for_stmt()
        elif self.at("return"):
            self.i += 1
            s = A.Return(self.expr(), line=t.line)
        elif self.at("fail"):
            self.i += 1
            s = A.Fail(self.ident().text, line=t.line)
        elif t.kind == "ident":
            s = self.simple()
        else:
            self.error(f"unexpected {t.text!r} at start of statement")
        self.accept(";")
        return s

    def let(self) -> A.Let:
        t = self.expect("let")
        name = self.ident().text
        declared = None
        if self.accept(":"):
            declared = self.type_name()
        self.expect("=")
        return A.Let(name, self.expr(), declared, line=t.line)

    def simple(self) -> A.Assign:
        t = self.ident()
        if self.accept("++"):
            return A.Assign(t.text, "+=", A.IntLit(1, line=t.line), line=t.line)
        if self.accept("--"):
            return A.Assign(t.text, "-=", A.IntLit(1, line=t.line), line=t.line)
        op = self.tok
        if op.kind == "op" and (op.text == "=" or op.text in _COMPOUND):
            self.i += 1
            return A.Assign(t.text, op.text, self.expr(), line=t.line)
        self.error(f"expected assignment to {t.text!r}")

    def if_stmt(self) -> A.If:
        t = self.expect("if")
        cond = self.expr()
        then = self.block()
        other: Tuple[A.Stmt, ...] = ()
        if self.accept("else"):
            other = (self.if_stmt(),) if self.at("if") else self.block()
        return A.If(cond, then, other, line=t.line)

    def for_stmt(self) -> A.For:
        t = self.expect("for")
        self.expect("(")
        init = None
        if not self.at(";"):
            init = self.let() if self.at("let") else self.simple()
        self.expect(";")
        cond = A.BoolLit(True, line=t.line) if self.at(";") else self.expr()
        self.expect(";")
        update = None if self.at(")") else self.simple()
        self.expect(")")
        return A.For(init, cond, update, self.block(), line=t.line)

    # -- expressions ---------------------------------------------------------

    def expr(self) -> A.Expr:
        cond = self.binary(0)
        if self.at("?"):
            t = self.tok
            self.i += 1
            then = self.expr()
            self.expect(":")
            other = self.expr()
            return A.Ternary(cond, then, other, line=t.line)
        return cond

    _LEVELS = (
        ("||",),
        ("&&",),
        ("==", "!="),
        ("<", "<=", ">", ">="),
        ("+", "-"),
        ("*", "/", "%"),
    )

    def binary(self, level: int) -> A.Expr:
        if level == len(self._LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        ops = self._LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            t = self.tok
            self.i += 1
            right = self.binary(level + 1)
            left = A.Binary(t.text, left, right, line=t.line)
        return left

    def unary(self) -> A.Expr:
        t = self.tok
        if self.accept("-"):
            operand = self.unary()
            # fold negative literals so that "-1" prints and matches as a literal
            if isinstance(operand, A.IntLit):
                return A.IntLit(-operand.value, line=t.line)
            if isinstance(operand, A.RealLit):
                return A.RealLit(-operand.value, "-" + operand.text, line=t.line)
            return A.Unary("-", operand, line=t.line)
        if self.accept("!"):
            return A.Unary("!", self.unary(), line=t.line)
        return self.primary()

    def primary(self) -> A.Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return A.IntLit(int(t.text), line=t.line)
        if t.kind == "real":
            self.i += 1
            return A.RealLit(float(t.text), t.text, line=t.line)
        if self.accept("true"):
            return A.BoolLit(True, line=t.line)
        if self.accept("false"):
            return A.BoolLit(False, line=t.line)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.i += 1
            if self.accept("("):
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return A.Call(t.text, tuple(args), line=t.line)
            return A.Var(t.text, line=t.line)
        self.error(f"unexpected {t.text or 'end of input'!r} in expression")


def parse_untyped(source: str) -> A.Program:
    return Parser(source).program()


def parse(source: str) -> A.Program:
    """Parse and type-check MiniLang source."""
    from .checker import check_program

    return check_program(parse_untyped(source))


def parse_file(path) -> A.Program:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())

"""SMT-LIB v2 emission, response parsing, and the subprocess adapter."""

from __future__ import annotations

import os
import select
import shutil
import subprocess
import time
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..minilang.ast import INT, REAL
from ..symbolic import IDIV, IMOD, RDIV, And, App, BoolConst, Cmp, Formula, Not, Or, Poly, Sym, Uif, atoms_of

ENV_SOLVER_BIN = "PASDA_SOLVER_BIN"


class BackendUnavailable(RuntimeError):
    """The external solver process could not be started."""


class EncodingError(ValueError):
    """The formula contains a term the protocol encoding does not support."""


def _q(name: str) -> str:
    return f"|{name}|"


def _num(c: Fraction, real: bool) -> str:
    if not real:
        if c.denominator != 1:
            raise EncodingError(f"non-integral int constant {c}")
        n = c.numerator
        return f"(- {-n})" if n < 0 else str(n)
    n, d = abs(c.numerator), c.denominator
    body = f"{n}.0" if d == 1 else f"(/ {n}.0 {d}.0)"
    return f"(- {body})" if c < 0 else body


def _sort(ty: str) -> str:
    return "Real" if ty == REAL else "Int"


class Encoder:
    """Translates formulas into an SMT-LIB script for one query."""

    def __init__(self):
        self.decls: Dict[str, str] = {}
        self.uif_sorts: Dict[str, Tuple[List[str], str]] = {}
        self.side: List[str] = []
        self._sqrt: Dict[App, str] = {}

    def declare_uifs(self, f: Formula):
        # the declared argument sort is the join over every occurrence
        for a in atoms_of(f):
            if isinstance(a, Uif):
                sorts = [x.ty for x in a.args]
                if a.name in self.uif_sorts:
                    prev, ret = self.uif_sorts[a.name]
                    sorts = [REAL if REAL in (p, s) else INT for p, s in zip(prev, sorts)]
                    ret = REAL if REAL in (ret, a.ty) else INT
                else:
                    ret = a.ty
                self.uif_sorts[a.name] = (sorts, ret)

    def poly(self, p: Poly, real: bool) -> str:
        parts = []
        for m, c in p.terms:
            factors = [self.atom(a, real) for a in m]
            if not m:
                parts.append(_num(c, real))
            elif c == 1:
                parts.append(factors[0] if len(factors) == 1 else f"(* {' '.join(factors)})")
            else:
                parts.append(f"(* {_num(c, real)} {' '.join(factors)})")
        if not parts:
            return _num(Fraction(0), real)
        return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"

    def _coerce(self, term: str, ty: str, real: bool) -> str:
        return f"(to_real {term})" if real and ty == INT else term

    def atom(self, a, real: bool) -> str:
        if isinstance(a, Sym):
            self.decls[a.name] = f"(declare-const {_q(a.name)} {_sort(a.ty)})"
            return self._coerce(_q(a.name), a.ty, real)
        if isinstance(a, Uif):
            sorts, ret = self.uif_sorts[a.name]
            args = " ".join(self.poly(x, s == REAL) for x, s in zip(a.args, sorts))
            self.decls[a.name] = f"(declare-fun {_q(a.name)} ({' '.join(map(_sort, sorts))}) {_sort(ret)})"
            term = f"({_q(a.name)} {args})" if a.args else _q(a.name)
            return self._coerce(term, ret, real)
        return self._coerce(self.app(a), a.ty, real)

    def app(self, a: App) -> str:
        if a.fn in (IDIV, IMOD):
            x, y = (self.poly(p, False) for p in a.args)
            # the protocol's div is Euclidean; rebuild truncation toward zero
            q = f"(ite (>= {x} 0) (div {x} {y}) (- (div (- {x}) {y})))"
            return q if a.fn == IDIV else f"(- {x} (* {y} {q}))"
        if a.fn == RDIV:
            x, y = (self.poly(p, True) for p in a.args)
            return f"(/ {x} {y})"
        if a.fn in ("abs", "min", "max"):
            real = a.ty == REAL
            args = [self.poly(p, real) for p in a.args]
            if a.fn == "abs":
                return f"(ite (>= {args[0]} {_num(Fraction(0), real)}) {args[0]} (- {args[0]}))"
            op = "<=" if a.fn == "min" else ">="
            return f"(ite ({op} {args[0]} {args[1]}) {args[0]} {args[1]})"
        if a.fn == "sqrt":
            if a not in self._sqrt:
                name = f"sqrt!{len(self._sqrt) + 1}"
                self._sqrt[a] = name
                x = self.poly(a.args[0], True)
                self.decls[name] = f"(declare-const {_q(name)} Real)"
                # negative arguments are left unconstrained (a relaxation)
                self.side.append(f"(assert (=> (>= {x} 0.0) (and (>= {_q(name)} 0.0) (= (* {_q(name)} {_q(name)}) {x}))))")
            return _q(self._sqrt[a])
        raise EncodingError(f"no encoding for {a.fn}")

    def formula(self, f: Formula) -> str:
        if isinstance(f, BoolConst):
            return "true" if f.value else "false"
        if isinstance(f, Cmp):
            real = f.lhs.ty == REAL or f.rhs.denominator != 1
            lhs = self.poly(f.lhs, real)
            rhs = _num(f.rhs, real)
            if f.op == "!=":
                return f"(not (= {lhs} {rhs}))"
            op = "=" if f.op == "==" else f.op
            return f"({op} {lhs} {rhs})"
        if isinstance(f, And):
            return f"(and {' '.join(self.formula(a) for a in f.args)})"
        if isinstance(f, Or):
            return f"(or {' '.join(self.formula(a) for a in f.args)})"
        if isinstance(f, Not):
            return f"(not {self.formula(f.arg)})"
        raise EncodingError(f"unexpected formula {f!r}")


def encode_query(f: Formula) -> Tuple[str, List[Uif], List[str]]:
    """Script asserting ``f`` (without check-sat), its UIF applications, and their terms."""
    enc = Encoder()
    enc.declare_uifs(f)
    body = enc.formula(f)
    apps = sorted({a for a in atoms_of(f) if isinstance(a, Uif)}, key=lambda a: a.key)
    terms = [enc.atom(a, a.ty == REAL) for a in apps]
    lines = ["(set-logic ALL)"]
    lines += [enc.decls[k] for k in sorted(enc.decls)]
    lines += enc.side
    lines.append(f"(assert {body})")
    return "\n".join(lines) + "\n", apps, terms


# ---------------------------------------------------------------------------
# Responses
# ---------------------------------------------------------------------------


def parse_sexpr(text: str):
    """Parse one s-expression into nested lists of atom strings."""
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "()":
            tokens.append(ch)
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == "|":
            j = text.index("|", i + 1)
            tokens.append(text[i + 1:j])
            i = j + 1
        elif ch == '"':
            j = text.index('"', i + 1)
            tokens.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append(text[i:j])
            i = j
    pos = 0

    def read():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            out = []
            while tokens[pos] != ")":
                out.append(read())
            pos += 1
            return out
        return tok

    return read()


def parse_value(v) -> Optional[Fraction]:
    """Numeric value of a model term, or None for algebraic numbers and the like."""
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            return None
    if len(v) == 2 and v[0] == "-":
        x = parse_value(v[1])
        return None if x is None else -x
    if len(v) == 3 and v[0] == "/":
        a, b = parse_value(v[1]), parse_value(v[2])
        return None if a is None or b is None or b == 0 else a / b
    return None


def parse_model(sexpr) -> Dict[str, Optional[Fraction]]:
    items = sexpr[1:] if sexpr and sexpr[0] == "model" else sexpr
    out = {}
    for item in items:
        if isinstance(item, list) and len(item) == 5 and item[0] == "define-fun" and item[2] == []:
            out[item[1]] = parse_value(item[4])
    return out


# ---------------------------------------------------------------------------
# Subprocess adapter
# ---------------------------------------------------------------------------


def find_solver_binary(explicit: Optional[str] = None) -> Optional[str]:
    if explicit:
        return explicit
    env = os.environ.get(ENV_SOLVER_BIN)
    if env:
        return env
    return shutil.which("z3")


def default_args(timeout_ms: int) -> List[str]:
    return ["-in", "-smt2", f"-t:{timeout_ms}"]


class SmtProcess:
    """One long-lived solver process; each query starts with ``(reset)``."""

    def __init__(self, binary: str, args: Sequence[str], timeout_ms: int, log_path: Optional[str] = None):
        self.binary = binary
        self.args = list(args)
        self.timeout_ms = timeout_ms
        self.log_path = log_path
        self.proc: Optional[subprocess.Popen] = None
        self._buf = b""
        self.queries = 0

    def _start(self):
        try:
            self.proc = subprocess.Popen([self.binary, *self.args], stdin=subprocess.PIPE,
                                         stdout=subprocess.PIPE, stderr=subprocess.DEVNULL)
        except OSError as e:
            raise BackendUnavailable(f"cannot start solver {self.binary!r}: {e}") from e
        self._buf = b""

    def close(self):
        if self.proc is not None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            self.proc.kill()
            self.proc.wait()
            self.proc = None

    def _log(self, text: str):
        if self.log_path:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(text)

    def _send(self, text: str):
        self._log(text)
        self.proc.stdin.write(text.encode())
        self.proc.stdin.flush()

    def _read_until(self, done, deadline: float) -> str:
        fd = self.proc.stdout.fileno()
        while True:
            text = self._buf.decode(errors="replace")
            n = done(text)
            if n is not None:
                self._buf = self._buf[len(text[:n].encode()):]
                return text[:n]
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TimeoutError
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                raise TimeoutError
            chunk = os.read(fd, 65536)
            if not chunk:
                raise BrokenPipeError("solver exited")
            self._buf += chunk

    def _read_line(self, deadline: float) -> str:
        def done(text):
            i = text.find("\n")
            return None if i < 0 else i + 1
        return self._read_until(done, deadline).strip()

    def _read_sexpr(self, deadline: float) -> str:
        def done(text):
            depth, seen, quoted = 0, False, False
            for i, ch in enumerate(text):
                if ch == "|":
                    quoted = not quoted
                elif quoted:
                    continue
                elif ch == "(":
                    depth += 1
                    seen = True
                elif ch == ")":
                    depth -= 1
                    if seen and depth == 0:
                        return i + 1
            return None
        return self._read_until(done, deadline)

    def query(self, script: str, value_terms: Sequence[str] = (), timeout_ms: Optional[int] = None):
        """Run one query; returns ``(answer, model, values)`` with answer sat/unsat/unknown."""
        timeout_ms = timeout_ms or self.timeout_ms
        for attempt in range(2):
            if self.proc is None or self.proc.poll() is not None:
                self._start()
            try:
                return self._query(script, value_terms, timeout_ms)
            except TimeoutError:
                self.close()
                return "unknown", {}, []
            except (BrokenPipeError, OSError):
                self.close()
                if attempt:
                    return "unknown", {}, []
        return "unknown", {}, []

    def _query(self, script: str, value_terms: Sequence[str], timeout_ms: int):
        self.queries += 1
        self._log(f"; query {self.queries}\n")
        self._send("(reset)\n" + script + "(check-sat)\n")
        # the process-level timeout argument should answer first; this is a backstop
        deadline = time.monotonic() + timeout_ms / 1000 + 2.0
        answer = None
        while answer is None:
            line = self._read_line(deadline)
            if line in ("sat", "unsat", "unknown", "timeout"):
                answer = "unknown" if line == "timeout" else line
            elif line.startswith("(error"):
                self._log(f"; solver error: {line}\n")
        if answer != "sat":
            return answer, {}, []
        self._send("(get-model)\n")
        model = parse_model(parse_sexpr(self._read_sexpr(deadline)))
        values: List[Optional[Fraction]] = []
        if value_terms:
            self._send(f"(get-value ({' '.join(value_terms)}))\n")
            pairs = parse_sexpr(self._read_sexpr(deadline))
            values = [parse_value(p[1]) if isinstance(p, list) and len(p) == 2 else None for p in pairs]
        return answer, model, values

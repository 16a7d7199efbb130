"""Symbolic values and path-condition formulas.

Symbolic values are kept in a canonical polynomial form: a sum of
monomials with exact rational coefficients, where each monomial is a
sorted product of *atoms*.  Atoms are input symbols, intrinsic
applications (``tan``, ``abs``, truncating integer division, ...), and
applications of uninterpreted functions.  Because the form is canonical,
``x + y + 1`` and ``1 + x + y`` are the same object and congruence between
syntactically equal UIF applications is plain equality.

Formulas are comparisons ``lhs op rhs`` where ``lhs`` is a constant-free
polynomial scaled to a canonical leading coefficient and ``rhs`` is a
rational constant, combined with ``And``/``Or``/``Not``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

from .minilang.ast import INT, REAL
from .minilang.interpreter import apply_intrinsic, trunc_div, trunc_mod

Number = Union[Fraction, float]

TRANSCENDENTAL = frozenset({"tan", "sin", "cos", "log"})
# internal application names that are not user-visible intrinsics
IDIV, IMOD, RDIV = "idiv", "imod", "rdiv"
MAX_FOLDED_POW = 16


def to_fraction(v) -> Fraction:
    """Exact rational for a finite number; floats go through their shortest repr."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(v, int):
        return Fraction(v)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {v!r}")
    return Fraction(repr(float(v)))


def fmt_number(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    d = c.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        # finite decimal expansion
        return repr(float(c)) if Fraction(repr(float(c))) == c else f"{c.numerator}/{c.denominator}"
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sym:
    name: str
    ty: str

    @cached_property
    def key(self) -> tuple:
        return (0, self.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    """Interpreted function application: intrinsic, idiv, imod or rdiv."""

    fn: str
    args: Tuple["Poly", ...]
    ty: str

    @cached_property
    def key(self) -> tuple:
        return (1, str(self))

    def __str__(self) -> str:
        if self.fn == IDIV:
            return f"({self.args[0]} / {self.args[1]})"
        if self.fn == IMOD:
            return f"({self.args[0]} % {self.args[1]})"
        if self.fn == RDIV:
            return f"({self.args[0]} / {self.args[1]})"
        return f"{self.fn}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Uif:
    name: str
    args: Tuple["Poly", ...]
    ty: str

    @cached_property
    def key(self) -> tuple:
        return (2, str(self))

    def __str__(self) -> str:
        return f"{self.name}({', '.join(map(str, self.args))})"


Atom = Union[Sym, App, Uif]
Monomial = Tuple[Atom, ...]


def _mono_key(m: Monomial) -> tuple:
    return (len(m), tuple(a.key for a in m))


def _mono_str(m: Monomial) -> str:
    return "*".join(str(a) for a in m)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly:
    """Canonical sum of monomials.  The empty monomial holds the constant."""

    terms: Tuple[Tuple[Monomial, Fraction], ...]
    ty: str

    @staticmethod
    def build(coeffs: Mapping[Monomial, Fraction], ty: str) -> "Poly":
        items = sorted(((m, c) for m, c in coeffs.items() if c != 0), key=lambda mc: _mono_key(mc[0]))
        return Poly(tuple(items), ty)

    @cached_property
    def as_dict(self) -> Dict[Monomial, Fraction]:
        return dict(self.terms)

    @property
    def is_const(self) -> bool:
        return all(len(m) == 0 for m, _ in self.terms)

    @property
    def const(self) -> Fraction:
        return self.as_dict.get((), Fraction(0))

    def without_const(self) -> "Poly":
        return Poly(tuple((m, c) for m, c in self.terms if m), self.ty)

    def atoms(self) -> Iterator[Atom]:
        """Every atom, recursively including atoms inside application arguments."""
        for m, _ in self.terms:
            for a in m:
                yield a
                if not isinstance(a, Sym):
                    for arg in a.args:
                        yield from arg.atoms()

    def top_atoms(self) -> Iterator[Atom]:
        seen = set()
        for m, _ in self.terms:
            for a in m:
                if a not in seen:
                    seen.add(a)
                    yield a

    @property
    def degree(self) -> int:
        return max((len(m) for m, _ in self.terms), default=0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.terms):
            neg = c < 0
            mag = -c if neg else c
            if not m:
                body = fmt_number(mag)
            elif mag == 1:
                body = _mono_str(m)
            else:
                body = f"{fmt_number(mag)}*{_mono_str(m)}"
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    # arithmetic sugar
    def __add__(self, other: "Poly") -> "Poly":
        return add(self, other)

    def __sub__(self, other: "Poly") -> "Poly":
        return sub(self, other)

    def __mul__(self, other: "Poly") -> "Poly":
        return mul(self, other)

    def __neg__(self) -> "Poly":
        return neg(self)


def const(value, ty: Optional[str] = None) -> Poly:
    if ty is None:
        ty = INT if isinstance(value, int) else REAL
    c = to_fraction(value)
    if ty == INT and c.denominator != 1:
        raise ValueError("int constant must be integral")
    return Poly.build({(): c}, ty)


ZERO = const(0, INT)


def sym(name: str, ty: str) -> Poly:
    return Poly.build({(Sym(name, ty),): Fraction(1)}, ty)


def atom_poly(atom: Atom) -> Poly:
    return Poly.build({(atom,): Fraction(1)}, atom.ty)


def _join(a: Poly, b: Poly) -> str:
    return REAL if REAL in (a.ty, b.ty) else INT


def add(a: Poly, b: Poly) -> Poly:
    d = dict(a.as_dict)
    for m, c in b.terms:
        d[m] = d.get(m, Fraction(0)) + c
    return Poly.build(d, _join(a, b))


def neg(a: Poly) -> Poly:
    return Poly(tuple((m, -c) for m, c in a.terms), a.ty)


def sub(a: Poly, b: Poly) -> Poly:
    return add(a, neg(b))


def scale(a: Poly, k: Fraction) -> Poly:
    return Poly.build({m: c * k for m, c in a.terms}, a.ty)


def mul(a: Poly, b: Poly) -> Poly:
    d: Dict[Monomial, Fraction] = {}
    for m1, c1 in a.terms:
        for m2, c2 in b.terms:
            m = tuple(sorted(m1 + m2, key=lambda at: at.key))
            d[m] = d.get(m, Fraction(0)) + c1 * c2
    return Poly.build(d, _join(a, b))


def to_real(a: Poly) -> Poly:
    return a if a.ty == REAL else Poly(a.terms, REAL)


def idiv(a: Poly, b: Poly) -> Poly:
    """Truncating integer division; caller guarantees ``b != 0`` on this path."""
    if a.is_const and b.is_const:
        return const(trunc_div(int(a.const), int(b.const)), INT)
    if b.is_const and b.const == 1:
        return a
    return atom_poly(App(IDIV, (a, b), INT))


def imod(a: Poly, b: Poly) -> Poly:
    if a.is_const and b.is_const:
        return const(trunc_mod(int(a.const), int(b.const)), INT)
    if b.is_const and abs(b.const) == 1:
        return ZERO
    return atom_poly(App(IMOD, (a, b), INT))


def rdiv(a: Poly, b: Poly) -> Poly:
    """Real division; caller guarantees ``b != 0`` on this path."""
    a, b = to_real(a), to_real(b)
    if b.is_const:
        return scale(a, 1 / b.const)
    return atom_poly(App(RDIV, (a, b), REAL))


def intrinsic(name: str, args: Tuple[Poly, ...], ty: str) -> Poly:
    if all(a.is_const for a in args):
        concrete = [a.const if a.ty == REAL else int(a.const) for a in args]
        if ty == REAL:
            concrete = [float(c) for c in concrete]
        v = apply_intrinsic(name, concrete, ty)
        if isinstance(v, int) or math.isfinite(v):
            return const(v, ty)
    if name == "pow":
        base, ex = args
        if ex.is_const and ex.const.denominator == 1 and 0 <= ex.const <= MAX_FOLDED_POW:
            return to_real(reduce(mul, [base] * int(ex.const), const(1, REAL)))
    if name == "abs":
        a = args[0]
        if a.is_const:
            return const(abs(a.const), ty)
    if ty == REAL:
        args = tuple(to_real(a) for a in args) if name != "abs" else args
    return atom_poly(App(name, tuple(args), ty))


def uif(name: str, args: Tuple[Poly, ...], ty: str) -> Poly:
    return atom_poly(Uif(name, tuple(args), ty))


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}
_NEGATE = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}


def _cmp_const(op: str, a, b) -> bool:
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "==": a == b, "!=": a != b}[op]


@dataclass(frozen=True)
class BoolConst:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True)
class Cmp:
    """``lhs op rhs``; ``lhs`` has no constant term and a canonical scale."""

    lhs: Poly
    op: str
    rhs: Fraction

    def __str__(self) -> str:
        return f"{self.lhs} {self.op} {fmt_number(self.rhs)}"


@dataclass(frozen=True)
class And:
    args: Tuple["Formula", ...]

    def __str__(self) -> str:
        return " && ".join(_paren(a) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: Tuple["Formula", ...]

    def __str__(self) -> str:
        return " || ".join(_paren(a) for a in self.args)


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return f"!({self.arg})"


Formula = Union[BoolConst, Cmp, And, Or, Not]


def _paren(f: Formula) -> str:
    return f"({f})" if isinstance(f, (And, Or)) else str(f)


def is_integral(p: Poly) -> bool:
    return all(c.denominator == 1 for _, c in p.terms) and all(a.ty == INT for m, _ in p.terms for a in m)


def _tighten(lhs: Poly, op: str, rhs: Fraction) -> Formula:
    """Round the bound of a comparison whose ``lhs`` only takes integer values."""
    if op == "<":
        return Cmp(lhs, "<=", Fraction(math.ceil(rhs) - 1))
    if op == ">":
        return Cmp(lhs, ">=", Fraction(math.floor(rhs) + 1))
    if op == "<=":
        return Cmp(lhs, op, Fraction(math.floor(rhs)))
    if op == ">=":
        return Cmp(lhs, op, Fraction(math.ceil(rhs)))
    if rhs.denominator != 1:
        return FALSE if op == "==" else TRUE
    return Cmp(lhs, op, rhs)


def compare(op: str, a: Poly, b: Poly) -> Formula:
    """Normalized comparison ``a op b``."""
    d = sub(a, b)
    lhs = d.without_const()
    rhs = -d.const
    if not lhs.terms:
        return TRUE if _cmp_const(op, Fraction(0), rhs) else FALSE
    integral = is_integral(lhs)
    if integral:
        g = abs(reduce(math.gcd, (int(c) for _, c in lhs.terms)))
        k = Fraction(g) if lhs.terms[0][1] > 0 else Fraction(-g)
    else:
        k = lhs.terms[0][1]
    if k != 1:
        lhs = scale(lhs, 1 / k)
        rhs = rhs / k
        if k < 0:
            op = _FLIP[op]
    if integral:
        return _tighten(lhs, op, rhs)
    return Cmp(lhs, op, rhs)


def conj(*fs: Formula) -> Formula:
    out = []
    for f in fs:
        if isinstance(f, BoolConst):
            if not f.value:
                return FALSE
            continue
        out.extend(f.args if isinstance(f, And) else (f,))
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(*fs: Formula) -> Formula:
    out = []
    for f in fs:
        if isinstance(f, BoolConst):
            if f.value:
                return TRUE
            continue
        out.extend(f.args if isinstance(f, Or) else (f,))
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def negate(f: Formula) -> Formula:
    """Negation pushed to the comparisons (result is in negation normal form)."""
    if isinstance(f, BoolConst):
        return BoolConst(not f.value)
    if isinstance(f, Cmp):
        op = _NEGATE[f.op]
        if is_integral(f.lhs):
            return _tighten(f.lhs, op, f.rhs)
        return Cmp(f.lhs, op, f.rhs)
    if isinstance(f, And):
        return disj(*(negate(a) for a in f.args))
    if isinstance(f, Or):
        return conj(*(negate(a) for a in f.args))
    if isinstance(f, Not):
        return nnf(f.arg)
    raise TypeError(f)


def nnf(f: Formula) -> Formula:
    if isinstance(f, Not):
        return negate(f.arg)
    if isinstance(f, And):
        return conj(*(nnf(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(nnf(a) for a in f.args))
    return f


def formula_polys(f: Formula) -> Iterator[Poly]:
    if isinstance(f, Cmp):
        yield f.lhs
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from formula_polys(a)
    elif isinstance(f, Not):
        yield from formula_polys(f.arg)


def atoms_of(obj) -> Iterator[Atom]:
    if isinstance(obj, Poly):
        yield from obj.atoms()
    else:
        for p in formula_polys(obj):
            yield from p.atoms()


def symbols_of(obj) -> Dict[str, str]:
    return {a.name: a.ty for a in atoms_of(obj) if isinstance(a, Sym)}


def has_uif(obj) -> bool:
    return any(isinstance(a, Uif) for a in atoms_of(obj))


def uif_names(obj) -> set:
    return {a.name for a in atoms_of(obj) if isinstance(a, Uif)}


def is_hard_atom(a: Atom) -> bool:
    if not isinstance(a, App):
        return False
    if a.fn in TRANSCENDENTAL:
        return True
    if a.fn == "pow":
        # constant small integer exponents were expanded into products
        return True
    return False


def has_hard_atoms(obj) -> bool:
    return any(is_hard_atom(a) for a in atoms_of(obj))


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------


def map_poly(p: Poly, fn: Callable[[Atom], Optional[Poly]]) -> Poly:
    """Rebuild ``p`` bottom-up, replacing each atom ``a`` by ``fn(a)`` when not None."""
    total = Poly.build({}, p.ty)
    for m, c in p.terms:
        prod = Poly.build({(): c}, p.ty)
        for a in m:
            prod = mul(prod, map_atom(a, fn))
        total = add(total, prod)
    return to_real(total) if p.ty == REAL else total


def map_atom(a: Atom, fn: Callable[[Atom], Optional[Poly]]) -> Poly:
    if not isinstance(a, Sym):
        args = tuple(map_poly(x, fn) for x in a.args)
        a = rebuild_atom(a, args)
        if not isinstance(a, (App, Uif)):
            return a
    r = fn(a)
    return r if r is not None else atom_poly(a)


def rebuild_atom(a: Atom, args: Tuple[Poly, ...]):
    """Re-apply ``a``'s function to new arguments (may fold to a constant)."""
    if isinstance(a, Uif):
        return Uif(a.name, args, a.ty)
    if a.fn == IDIV:
        r = idiv(*args)
    elif a.fn == IMOD:
        r = imod(*args)
    elif a.fn == RDIV:
        r = rdiv(*args)
    else:
        r = intrinsic(a.fn, args, a.ty)
    if len(r.terms) == 1 and r.terms[0][1] == 1 and len(r.terms[0][0]) == 1:
        return r.terms[0][0][0]
    return r


def map_formula(f: Formula, fn: Callable[[Atom], Optional[Poly]]) -> Formula:
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, Cmp):
        return compare(f.op, map_poly(f.lhs, fn), Poly.build({(): f.rhs}, f.lhs.ty))
    if isinstance(f, And):
        return conj(*(map_formula(a, fn) for a in f.args))
    if isinstance(f, Or):
        return disj(*(map_formula(a, fn) for a in f.args))
    if isinstance(f, Not):
        return Not(map_formula(f.arg, fn))
    raise TypeError(f)


def substitute(obj, mapping: Mapping[Atom, Poly]):
    fn = mapping.get
    if isinstance(obj, Poly):
        return map_poly(obj, fn)
    return map_formula(obj, fn)


# ---------------------------------------------------------------------------
# Concrete evaluation
# ---------------------------------------------------------------------------


class EvalError(Exception):
    """Evaluation hit an undefined operation (division by zero, unknown UIF value)."""


def eval_poly(p: Poly, env: Mapping[str, Number], uif_table: Optional[Mapping] = None) -> Number:
    total: Number = Fraction(0)
    for m, c in p.terms:
        v: Number = c
        for a in m:
            v = v * eval_atom(a, env, uif_table)
        total = total + v
    return total


def eval_atom(a: Atom, env: Mapping[str, Number], uif_table: Optional[Mapping] = None) -> Number:
    if isinstance(a, Sym):
        v = env[a.name]
        return to_fraction(v) if not isinstance(v, float) or math.isfinite(v) else v
    args = tuple(eval_poly(x, env, uif_table) for x in a.args)
    if isinstance(a, Uif):
        if uif_table is None:
            raise EvalError(f"no value for {a.name}{args}")
        try:
            # tables may be dict subclasses that invent values on demand
            return uif_table[(a.name, args)]
        except KeyError:
            raise EvalError(f"no value for {a.name}{args}") from None
    if a.fn in (IDIV, IMOD):
        x, y = args
        if y == 0:
            raise EvalError("division by zero")
        x, y = int(x), int(y)
        return Fraction(trunc_div(x, y) if a.fn == IDIV else trunc_mod(x, y))
    if a.fn == RDIV:
        x, y = args
        if y == 0:
            raise EvalError("division by zero")
        return x / y
    if a.ty == INT and a.fn in ("abs", "min", "max"):
        ints = [int(x) for x in args]
        return Fraction({"abs": lambda: abs(ints[0]), "min": lambda: min(ints), "max": lambda: max(ints)}[a.fn]())
    if a.fn in ("abs", "min", "max") and all(isinstance(x, Fraction) for x in args):
        return {"abs": lambda: abs(args[0]), "min": lambda: min(args), "max": lambda: max(args)}[a.fn]()
    v = apply_intrinsic(a.fn, [float(x) for x in args], REAL)
    return to_fraction(v) if math.isfinite(v) else v


def eval_formula(f: Formula, env: Mapping[str, Number], uif_table: Optional[Mapping] = None) -> bool:
    if isinstance(f, BoolConst):
        return f.value
    if isinstance(f, Cmp):
        lhs = eval_poly(f.lhs, env, uif_table)
        rhs = f.rhs
        if isinstance(lhs, float):
            if math.isnan(lhs):
                return f.op == "!="
            rhs = float(rhs)
        return _cmp_const(f.op, lhs, rhs)
    if isinstance(f, And):
        return all(eval_formula(a, env, uif_table) for a in f.args)
    if isinstance(f, Or):
        return any(eval_formula(a, env, uif_table) for a in f.args)
    if isinstance(f, Not):
        return not eval_formula(f.arg, env, uif_table)
    raise TypeError(f)


def conjuncts(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, And):
        return f.args
    if isinstance(f, BoolConst) and f.value:
        return ()
    return (f,)


def iter_subformulas(fs: Iterable[Formula]) -> Iterator[Formula]:
    for f in fs:
        yield f
        if isinstance(f, (And, Or)):
            yield from iter_subformulas(f.args)
        elif isinstance(f, Not):
            yield from iter_subformulas((f.arg,))

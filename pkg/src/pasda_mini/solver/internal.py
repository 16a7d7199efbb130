"""Internal decision procedure, usable without any external solver.

Three stages, each sound on its own:

1. ``abs``/``min``/``max`` are eliminated by case splitting and the formula
   is put into disjunctive normal form.  Every cube is linearized by
   treating nonlinear monomials and non-polynomial applications as opaque
   variables, and decided by Fourier-Motzkin.  The relaxation only drops
   information, so an infeasible cube really is infeasible.
2. Candidate assignments (the Fourier-Motzkin models, then enumeration of
   ints over the configured domain and seeded samples of reals) are
   re-evaluated concretely against the original formula.  UIF values are
   drawn from a table that is filled consistently as evaluation proceeds,
   which makes congruence hold by construction.
3. Int-only formulas whose symbols are all bounded by the formula itself
   inside the domain are enumerated exhaustively, which decides them.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from ..minilang.ast import INT, REAL
from ..symbolic import (
    App, And, BoolConst, Cmp, EvalError, Formula, Or, Sym, Uif, atoms_of, compare, conj, const, disj,
    eval_formula, eval_poly, iter_subformulas, neg, substitute, symbols_of, to_real,
)
from . import fm
from .simplify import simplify

PIECEWISE = ("abs", "min", "max")
MAX_CASE_SPLITS = 8
MAX_CUBES = 256
ENUM_BUDGET = 20000
SEARCH_BUDGET = 3000


class UifTable(dict):
    """UIF interpretation that invents a value for each new argument tuple."""

    def __init__(self, rng: Optional[random.Random] = None, pool=(0,)):
        super().__init__()
        self.rng = rng
        self.pool = pool

    def __missing__(self, key):
        v = Fraction(self.rng.choice(self.pool) if self.rng else self.pool[0])
        self[key] = v
        return v


def _piecewise_atom(f: Formula) -> Optional[App]:
    for a in atoms_of(f):
        if isinstance(a, App) and a.fn in PIECEWISE:
            if not any(isinstance(b, App) and b.fn in PIECEWISE for arg in a.args for b in arg.atoms()):
                return a
    return None


def eliminate_piecewise(f: Formula) -> Optional[Formula]:
    """Equivalent formula without abs/min/max, or None past the split budget."""
    for _ in range(MAX_CASE_SPLITS + 1):
        a = _piecewise_atom(f)
        if a is None:
            return f
        fix = to_real if a.ty == REAL else (lambda p: p)
        if a.fn == "abs":
            p = a.args[0]
            zero = const(0, p.ty)
            cases = [(compare(">=", p, zero), fix(p)), (compare("<", p, zero), fix(neg(p)))]
        else:
            x, y = a.args
            first = compare("<=" if a.fn == "min" else ">=", x, y)
            second = compare(">" if a.fn == "min" else "<", x, y)
            cases = [(first, fix(x)), (second, fix(y))]
        f = simplify(disj(*(conj(c, substitute(f, {a: v})) for c, v in cases)))
    return None


def to_cubes(f: Formula, cap: int = MAX_CUBES) -> Optional[List[List[Cmp]]]:
    """DNF as a list of comparison lists; ``!=`` becomes two strict cubes."""
    if isinstance(f, BoolConst):
        return [[]] if f.value else []
    if isinstance(f, Cmp):
        if f.op == "!=":
            lo, hi = compare("<", f.lhs, const(f.rhs, f.lhs.ty)), compare(">", f.lhs, const(f.rhs, f.lhs.ty))
            return [[lo], [hi]]
        return [[f]]
    if isinstance(f, Or):
        out: List[List[Cmp]] = []
        for a in f.args:
            sub = to_cubes(a, cap)
            if sub is None:
                return None
            out.extend(sub)
            if len(out) > cap:
                return None
        return out
    if isinstance(f, And):
        out = [[]]
        for a in f.args:
            sub = to_cubes(a, cap)
            if sub is None or len(out) * len(sub) > cap:
                return None
            out = [c1 + c2 for c1 in out for c2 in sub]
        return out
    raise TypeError(f"unexpected formula {f!r}")


def _var_key(mono) -> object:
    if len(mono) == 1 and isinstance(mono[0], Sym):
        return mono[0].name
    return mono


def _rows(cube: List[Cmp]) -> Tuple[List[fm.Row], frozenset]:
    rows = []
    integral = set()
    for c in cube:
        coeffs = {}
        for m, k in c.lhs.terms:
            key = _var_key(m)
            coeffs[key] = k
            if all(a.ty == INT for a in m):
                integral.add(key)
        if c.op in ("<=", "<"):
            rows.append(fm.Row.make(coeffs, c.op, c.rhs))
        elif c.op in (">=", ">"):
            rows.append(fm.Row.make({k: -v for k, v in coeffs.items()}, "<" if c.op == ">" else "<=", -c.rhs))
        else:
            rows.append(fm.Row.make(coeffs, "==", c.rhs))
    return rows, frozenset(integral)


def _table_from_model(model) -> Optional[UifTable]:
    """UIF table from the values the relaxation chose for opaque applications."""
    table = UifTable()
    pending = {k[0]: v for k, v in model.items()
               if isinstance(k, tuple) and len(k) == 1 and isinstance(k[0], Uif)}
    env = {k: v for k, v in model.items() if isinstance(k, str)}
    # nested applications need their arguments' tables first
    for _ in range(len(pending) + 1):
        progress = False
        for app, value in list(pending.items()):
            try:
                args = tuple(eval_poly(a, env, dict(table)) for a in app.args)
            except (EvalError, KeyError):
                continue
            key = (app.name, args)
            if key in table and table[key] != value:
                return None
            dict.__setitem__(table, key, value)
            del pending[app]
            progress = True
        if not progress:
            break
    return table


def _witness_env(symbols: Dict[str, str], values: Dict[str, Fraction]) -> Dict[str, Fraction]:
    return {name: Fraction(values.get(name, 0)) for name in symbols}


def _holds(f: Formula, env, table) -> Optional[bool]:
    try:
        return eval_formula(f, env, table)
    except EvalError:
        return None


def _constants(f: Formula) -> List[Fraction]:
    vals = set()
    for g in iter_subformulas([f]):
        if isinstance(g, Cmp):
            vals.add(g.rhs)
            for _, c in g.lhs.terms:
                if c.denominator == 1:
                    vals.add(c)
    return sorted(vals)


def _self_bounds(f: Formula, symbols: Dict[str, str]) -> Dict[str, Tuple[Optional[Fraction], Optional[Fraction]]]:
    """Bounds on single symbols imposed by top-level conjuncts."""
    bounds = {name: [None, None] for name in symbols}
    for c in (f.args if isinstance(f, And) else (f,)):
        if not isinstance(c, Cmp) or len(c.lhs.terms) != 1:
            continue
        (m, k), = c.lhs.terms
        if len(m) != 1 or not isinstance(m[0], Sym) or k != 1:
            continue
        b = bounds[m[0].name]
        if c.op in ("<=", "==") and (b[1] is None or c.rhs < b[1]):
            b[1] = c.rhs
        if c.op in (">=", "==") and (b[0] is None or c.rhs > b[0]):
            b[0] = c.rhs
    return {k: (v[0], v[1]) for k, v in bounds.items()}


class InternalBackend:
    def __init__(self, int_lo: int, int_hi: int, real_samples: int, seed: int):
        self.int_lo = int_lo
        self.int_hi = int_hi
        self.real_samples = real_samples
        self.seed = seed

    def check(self, f: Formula):
        """Return ``("sat", env, table)``, ``("unsat", None, None)`` or ``("unknown", None, None)``."""
        symbols = symbols_of(f)
        rng = random.Random(f"{self.seed}:{f}")
        refuted = False

        flat = eliminate_piecewise(f)
        cubes = to_cubes(flat) if flat is not None else None
        if cubes is not None:
            refuted = True
            for cube in cubes:
                cube_f = simplify(conj(*cube))
                if isinstance(cube_f, BoolConst):
                    if not cube_f.value:
                        continue
                    cube = []
                else:
                    cube = list(cube_f.args) if isinstance(cube_f, And) else [cube_f]
                rows, integral = _rows(cube)
                status, model = fm.solve(rows, integral)
                if status == fm.UNSAT:
                    continue
                refuted = False
                if status == fm.SAT:
                    table = _table_from_model(model)
                    if table is not None:
                        env = _witness_env(symbols, model)
                        if _holds(f, env, table):
                            return "sat", env, table
        if refuted:
            return "unsat", None, None

        found = self._search(f, symbols, rng)
        if found is not None:
            return ("sat",) + found
        if self._exhaustive_refutes(f, symbols):
            return "unsat", None, None
        return "unknown", None, None

    # -- search --------------------------------------------------------------

    def _pools(self, f: Formula, symbols: Dict[str, str], rng: random.Random) -> Dict[str, List[Fraction]]:
        consts = _constants(f)
        near = sorted({c + d for c in consts for d in (Fraction(-1), Fraction(-1, 2), 0, Fraction(1, 2), 1)})
        pools = {}
        for name, ty in sorted(symbols.items()):
            if ty == INT:
                vals = [Fraction(v) for v in range(self.int_lo, self.int_hi + 1)]
                vals += [Fraction(math.floor(c)) for c in near]
            else:
                vals = [Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2)] + near
                vals += [Fraction(round(rng.uniform(self.int_lo, self.int_hi), 3)).limit_denominator(1000)
                         for _ in range(self.real_samples)]
            seen, uniq = set(), []
            for v in vals:
                if v not in seen:
                    seen.add(v)
                    uniq.append(v)
            pools[name] = uniq
        return pools

    def _candidates(self, pools: Dict[str, List[Fraction]], rng: random.Random) -> Iterator[Dict[str, Fraction]]:
        names = sorted(pools)
        size = math.prod(len(pools[n]) for n in names) if names else 1
        if size <= SEARCH_BUDGET:
            for combo in itertools.product(*(pools[n] for n in names)):
                yield dict(zip(names, combo))
            return
        for _ in range(SEARCH_BUDGET):
            yield {n: rng.choice(pools[n]) for n in names}

    def _search(self, f: Formula, symbols: Dict[str, str], rng: random.Random):
        has_uif = any(isinstance(a, Uif) for a in atoms_of(f))
        pools = self._pools(f, symbols, rng)
        uif_pool = tuple(range(-3, 4))
        for env in self._candidates(pools, rng):
            tables = [UifTable()]
            if has_uif:
                tables += [UifTable(random.Random(rng.random()), uif_pool) for _ in range(3)]
            for table in tables:
                if _holds(f, env, table):
                    return env, table
        return None

    def _exhaustive_refutes(self, f: Formula, symbols: Dict[str, str]) -> bool:
        if not symbols or any(ty != INT for ty in symbols.values()):
            return False
        if any(isinstance(a, Uif) or (isinstance(a, App) and a.ty == REAL) for a in atoms_of(f)):
            return False
        bounds = _self_bounds(f, symbols)
        ranges = []
        for name in sorted(symbols):
            lo, hi = bounds[name]
            if lo is None or hi is None or lo < self.int_lo or hi > self.int_hi:
                return False
            ranges.append(range(math.ceil(lo), math.floor(hi) + 1))
        if math.prod(len(r) for r in ranges) > ENUM_BUDGET:
            return False
        names = sorted(symbols)
        for combo in itertools.product(*ranges):
            holds = _holds(f, dict(zip(names, map(Fraction, combo))), None)
            if holds is None:
                return False
            if holds:
                return False
        return True

"""Exact Fourier-Motzkin elimination over the rationals.

Decides feasibility of a conjunction of linear constraints
``sum(coeffs[v] * v) op bound`` with ``op`` in ``<=``, ``<``, ``==`` and, when
feasible, reconstructs a model by back-substitution.  Variables are
arbitrary hashable keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Hashable, List, Optional, Tuple

Coeffs = Dict[Hashable, Fraction]


@dataclass(frozen=True)
class Row:
    coeffs: Tuple[Tuple[Hashable, Fraction], ...]
    op: str
    bound: Fraction

    @staticmethod
    def make(coeffs: Coeffs, op: str, bound: Fraction) -> "Row":
        items = tuple(sorted(((k, c) for k, c in coeffs.items() if c != 0), key=lambda kc: repr(kc[0])))
        return Row(items, op, Fraction(bound))

    @property
    def as_dict(self) -> Coeffs:
        return dict(self.coeffs)

    def trivially(self) -> Optional[bool]:
        """Truth value when no variables remain, else None."""
        if self.coeffs:
            return None
        if self.op == "==":
            return self.bound == 0
        if self.op == "<":
            return 0 < self.bound
        return 0 <= self.bound

    def normalized(self) -> "Row":
        if not self.coeffs:
            return self
        k = abs(self.coeffs[0][1])
        if self.op == "==" and self.coeffs[0][1] < 0:
            k = -k
        if k == 1:
            return self
        return Row(tuple((v, c / k) for v, c in self.coeffs), self.op, self.bound / k)


SAT, UNSAT, GAVE_UP = "sat", "unsat", "gave_up"


def _substitute(row: Row, var, expr: Coeffs, const: Fraction) -> Row:
    d = row.as_dict
    a = d.pop(var, None)
    if a is None:
        return row
    for k, c in expr.items():
        d[k] = d.get(k, Fraction(0)) + a * c
    return Row.make(d, row.op, row.bound - a * const)


def _pick_value(lo, lo_strict, hi, hi_strict) -> Fraction:
    """Point of the interval closest to zero, preferring integers."""
    def ok(v):
        if lo is not None and (v < lo or (v == lo and lo_strict)):
            return False
        if hi is not None and (v > hi or (v == hi and hi_strict)):
            return False
        return True

    if ok(Fraction(0)):
        return Fraction(0)
    if lo is not None and (lo > 0 or (lo == 0 and lo_strict)):
        cand = lo if lo.denominator == 1 and not lo_strict else Fraction(math.floor(lo) + 1)
    else:
        cand = hi if hi.denominator == 1 and not hi_strict else Fraction(math.ceil(hi) - 1)
    if ok(cand):
        return cand
    # no integer fits, so both bounds are finite
    return (lo + hi) / 2


def solve(rows: List[Row], integral: FrozenSet = frozenset(), max_rows: int = 4000
          ) -> Tuple[str, Optional[Dict[Hashable, Fraction]]]:
    """Return ``(SAT, model)``, ``(UNSAT, None)`` or ``(GAVE_UP, None)``."""
    eqs = [r for r in rows if r.op == "=="]
    ineqs = [r for r in rows if r.op != "=="]
    subs: List[Tuple[Hashable, Coeffs, Fraction]] = []
    while eqs:
        row = eqs.pop()
        t = row.trivially()
        if t is not None:
            if not t:
                return UNSAT, None
            continue
        # prefer eliminating a non-integral variable, then the smallest coefficient
        var, a = min(row.coeffs, key=lambda kc: (kc[0] in integral, abs(kc[1]), repr(kc[0])))
        expr = {k: -c / a for k, c in row.coeffs if k != var}
        const = row.bound / a
        eqs = [_substitute(r, var, expr, const) for r in eqs]
        ineqs = [_substitute(r, var, expr, const) for r in ineqs]
        subs.append((var, expr, const))

    steps: List[Tuple[Hashable, List[Row]]] = []
    current = set()
    for r in ineqs:
        t = r.trivially()
        if t is False:
            return UNSAT, None
        if t is None:
            current.add(r.normalized())
    while current:
        counts: Dict[Hashable, List[int]] = {}
        for r in current:
            for k, c in r.coeffs:
                pn = counts.setdefault(k, [0, 0])
                pn[0 if c > 0 else 1] += 1
        var = min(counts, key=lambda k: (counts[k][0] * counts[k][1] - counts[k][0] - counts[k][1], repr(k)))
        pos, neg, rest = [], [], []
        for r in current:
            c = r.as_dict.get(var)
            if c is None:
                rest.append(r)
            elif c > 0:
                pos.append(r)
            else:
                neg.append(r)
        steps.append((var, pos + neg))
        new = set(rest)
        for p in pos:
            cp = p.as_dict[var]
            for n in neg:
                cn = -n.as_dict[var]
                d: Coeffs = {}
                for k, c in p.coeffs:
                    d[k] = d.get(k, Fraction(0)) + c * cn
                for k, c in n.coeffs:
                    d[k] = d.get(k, Fraction(0)) + c * cp
                d.pop(var, None)
                op = "<" if "<" in (p.op, n.op) else "<="
                row = Row.make(d, op, p.bound * cn + n.bound * cp)
                t = row.trivially()
                if t is False:
                    return UNSAT, None
                if t is None:
                    new.add(row.normalized())
        if len(new) > max_rows:
            return GAVE_UP, None
        current = new

    model: Dict[Hashable, Fraction] = {}
    for var, rs in reversed(steps):
        lo = hi = None
        lo_s = hi_s = False
        for r in rs:
            d = r.as_dict
            cv = d.pop(var)
            rest = sum((c * model.setdefault(k, Fraction(0)) for k, c in d.items()), Fraction(0))
            b = (r.bound - rest) / cv
            strict = r.op == "<"
            if cv > 0:
                if hi is None or b < hi or (b == hi and strict):
                    hi, hi_s = b, strict
            elif lo is None or b > lo or (b == lo and strict):
                lo, lo_s = b, strict
        model[var] = _pick_value(lo, lo_s, hi, hi_s)
    for var, expr, const in reversed(subs):
        model[var] = const + sum((c * model.setdefault(k, Fraction(0)) for k, c in expr.items()), Fraction(0))
    return SAT, model

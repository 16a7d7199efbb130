"""Formula simplification.

Beyond the folding that the canonical term representation already does,
conjunctions are tightened per left-hand side: all bounds on the same
term are intersected into an interval, so ``x > 0 && x <= 0`` collapses to
``false`` even when other conjuncts mention ``tan``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from ..symbolic import (
    FALSE, TRUE, And, Cmp, Formula, Or, Poly, conj, disj, has_hard_atoms, negate, nnf,
)


@dataclass
class _Interval:
    lo: Optional[Fraction] = None
    lo_strict: bool = False
    hi: Optional[Fraction] = None
    hi_strict: bool = False
    eq: Optional[Fraction] = None
    conflict: bool = False
    excluded: Set[Fraction] = field(default_factory=set)

    def add(self, op: str, c: Fraction):
        if op == "==":
            if self.eq is not None and self.eq != c:
                self.conflict = True
            self.eq = c
        elif op == "!=":
            self.excluded.add(c)
        elif op in ("<", "<="):
            strict = op == "<"
            if self.hi is None or c < self.hi or (c == self.hi and strict):
                self.hi, self.hi_strict = c, strict
        else:
            strict = op == ">"
            if self.lo is None or c > self.lo or (c == self.lo and strict):
                self.lo, self.lo_strict = c, strict

    def contains(self, v: Fraction) -> bool:
        if self.lo is not None and (v < self.lo or (v == self.lo and self.lo_strict)):
            return False
        if self.hi is not None and (v > self.hi or (v == self.hi and self.hi_strict)):
            return False
        return True

    def to_atoms(self, lhs: Poly) -> Optional[List[Formula]]:
        """Minimal comparisons describing the interval, or None when empty."""
        if self.conflict:
            return None
        if self.eq is not None:
            if not self.contains(self.eq) or self.eq in self.excluded:
                return None
            return [Cmp(lhs, "==", self.eq)]
        if self.lo is not None and self.hi is not None:
            if self.lo > self.hi or (self.lo == self.hi and (self.lo_strict or self.hi_strict)):
                return None
            if self.lo == self.hi:
                if self.lo in self.excluded:
                    return None
                return [Cmp(lhs, "==", self.lo)]
        out: List[Formula] = []
        if self.lo is not None:
            out.append(Cmp(lhs, ">" if self.lo_strict else ">=", self.lo))
        if self.hi is not None:
            out.append(Cmp(lhs, "<" if self.hi_strict else "<=", self.hi))
        for v in sorted(self.excluded):
            if self.contains(v):
                out.append(Cmp(lhs, "!=", v))
        return out


def _simplify_and(args: Tuple[Formula, ...]) -> Formula:
    order: List[object] = []
    groups: Dict[Poly, _Interval] = {}
    others: List[Formula] = []
    for a in args:
        if isinstance(a, Cmp):
            if a.lhs not in groups:
                groups[a.lhs] = _Interval()
                order.append(a.lhs)
            groups[a.lhs].add(a.op, a.rhs)
        elif a not in others:
            others.append(a)
            order.append(a)
    out: List[Formula] = []
    for item in order:
        if isinstance(item, Poly):
            atoms = groups[item].to_atoms(item)
            if atoms is None:
                return FALSE
            out.extend(atoms)
        else:
            out.append(item)
    present = set(out)
    for f in out:
        if not isinstance(f, Cmp) and negate(f) in present:
            return FALSE
    return conj(*out)


def _simplify_or(args: Tuple[Formula, ...]) -> Formula:
    out: List[Formula] = []
    for a in args:
        if a not in out:
            out.append(a)
    present = set(out)
    for f in out:
        if negate(f) in present:
            return TRUE
    return disj(*out)


def simplify(f: Formula) -> Formula:
    """Logically equivalent, negation-free, constant-folded form of ``f``."""
    f = nnf(f)
    if isinstance(f, And):
        args = [simplify(a) for a in f.args]
        flat = conj(*args)
        if not isinstance(flat, And):
            return flat
        return _simplify_and(flat.args)
    if isinstance(f, Or):
        args = [simplify(a) for a in f.args]
        flat = disj(*args)
        if not isinstance(flat, Or):
            return flat
        return _simplify_or(flat.args)
    return f


def has_hard_terms(f: Formula) -> bool:
    """True when ``f`` mentions a transcendental application (after simplification)."""
    return has_hard_atoms(f)

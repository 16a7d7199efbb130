"""Seeded generator of int-only MiniLang version pairs.

The old version is random; the new version differs in at most one
mutable token (a constant, arithmetic operator, or comparison).  Every
function starts with a guard that fails outside [-50, 50], so all
non-failing paths bound their inputs to that box.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

BOX = 50
_ARITH = ("+", "-", "*")
_CMP = ("<", "<=", ">", ">=", "==", "!=")


@dataclass
class Mut:
    kind: str
    value: object


@dataclass(frozen=True)
class Pair:
    seed: int
    params: Tuple[str, ...]
    old: str
    new: str
    mutated: bool


class _Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.parts: List[object] = []

    def emit(self, *items):
        self.parts.extend(items)

    def const(self, lo=-5, hi=5):
        self.emit(Mut("const", self.rng.randint(lo, hi)))

    def expr(self, names: Sequence[str], depth: int = 2):
        r = self.rng.random()
        if depth == 0 or r < 0.35:
            if self.rng.random() < 0.7:
                self.emit(self.rng.choice(names))
            else:
                self.const()
            return
        if r < 0.45:
            # division and remainder only by nonzero constants
            self.emit("(")
            self.expr(names, depth - 1)
            self.emit(" ", self.rng.choice("/%"), " ", Mut("divisor", self.rng.choice([2, 3, -2, 5])), ")")
            return
        self.emit("(")
        self.expr(names, depth - 1)
        self.emit(" ", Mut("arith", self.rng.choice(_ARITH)), " ")
        self.expr(names, depth - 1)
        self.emit(")")

    def cond(self, names: Sequence[str]):
        self.expr(names, 1)
        self.emit(" ", Mut("cmp", self.rng.choice(_CMP)), " ")
        self.expr(names, 1)

    def body(self, params: Sequence[str]):
        names = list(params)
        guard = " || ".join(f"{p} < -{BOX} || {p} > {BOX}" for p in params)
        self.emit(f"  if ({guard}) {{ fail Range; }}\n")
        self.emit("  let a = ")
        self.expr(names)
        self.emit(";\n")
        names.append("a")
        if self.rng.random() < 0.7:
            self.emit("  if (")
            self.cond(names)
            self.emit(") { a = ")
            self.expr(names)
            self.emit("; } else { a += ")
            self.expr(names, 1)
            self.emit("; }\n")
        if self.rng.random() < 0.4:
            self.emit("  for (let i = 0; i < ")
            self.emit(Mut("bound", self.rng.randint(0, 3)))
            self.emit("; i++) { a += ")
            self.expr(names + ["i"], 1)
            self.emit("; }\n")
        if self.rng.random() < 0.5:
            self.emit("  let b = ")
            self.expr(names)
            self.emit(";\n")
            names.append("b")
            if self.rng.random() < 0.5:
                self.emit("  if (")
                self.cond(names)
                self.emit(") { return b; }\n")
        self.emit("  return ")
        self.expr(names)
        self.emit(";\n")


def _mutate(rng: random.Random, m: Mut) -> object:
    if m.kind == "const":
        return m.value + rng.choice((-1, 1))
    if m.kind == "divisor":
        return rng.choice([d for d in (2, 3, -2, 5) if d != m.value])
    if m.kind == "bound":
        return m.value + 1 if m.value < 3 else m.value - 1
    pool = _ARITH if m.kind == "arith" else _CMP
    return rng.choice([o for o in pool if o != m.value])


def _render(name: str, params: Sequence[str], parts: Sequence[object], override: Optional[Tuple[int, object]]) -> str:
    out = []
    for i, p in enumerate(parts):
        if isinstance(p, Mut):
            v = override[1] if override is not None and override[0] == i else p.value
            out.append(f"({v})" if isinstance(v, int) and v < 0 else str(v))
        else:
            out.append(p)
    sig = ", ".join(f"{p}: int" for p in params)
    return f"fn {name}({sig}) -> int {{\n" + "".join(out) + "}\n"


def make_pair(seed: int, name: str = "f", mutate_probability: float = 0.8) -> Pair:
    rng = random.Random(seed)
    params = ("x",) if rng.random() < 0.5 else ("x", "y")
    g = _Gen(rng)
    g.body(params)
    muts = [i for i, p in enumerate(g.parts) if isinstance(p, Mut)]
    override = None
    if muts and rng.random() < mutate_probability:
        i = rng.choice(muts)
        override = (i, _mutate(rng, g.parts[i]))
    return Pair(seed, params, _render(name, params, g.parts, None), _render(name, params, g.parts, override),
                override is not None)


def box_inputs(arity: int, box: int = BOX):
    return itertools.product(range(-box, box + 1), repeat=arity)

"""Depth-limited symbolic exploration of a product unit.

Paths are enumerated depth-first by replay: a path is identified by its
sequence of branch choices, and executing the unit with a choice prefix
either finishes the path or stops at the first branch beyond the prefix.
At such a branch both arms are checked for feasibility and the feasible
ones are pushed as extended prefixes (true arm explored first).

Only branch conditions that remain symbolic count as decisions.  A
condition that folds to a constant under the current state is not a
choice point.  When a path attempts decision ``depth_limit + 1``, each
feasible arm of that decision yields a depth-limited record whose pc
includes the decision's constraint.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .classify import (
    OutputClass, PartitionClass, ReachClass, decide_output, overall_partition, reachability_from,
)
from .diffmatch import _may_fail
from .minilang import ast as A
from .minilang.errors import FuelExhausted
from .minilang.interpreter import DIV_BY_ZERO, Effect, EffectKind
from .product import ProductUnit
from .solver import Verdict, simplify
from .symbolic import (
    FALSE, TRUE, BoolConst, Formula, Poly, add, compare, conj, const, disj, has_hard_atoms, has_uif, idiv, imod,
    intrinsic, mul, neg, negate, rdiv, sub, sym, to_fraction, to_real, uif,
)

DEFAULT_PATH_FUEL = 200_000


class ExplorationStatus(str, Enum):
    COMPLETE = "COMPLETE"
    DEADLINE_HIT = "DEADLINE_HIT"


class DeadlineHit(Exception):
    """The cooperative deadline passed during exploration."""


@dataclass(frozen=True)
class PartitionRecord:
    index: int
    pc: Formula
    effect_v1: Optional[Effect]
    effect_v2: Optional[Effect]
    covered_v1: Tuple[int, ...]
    covered_v2: Tuple[int, ...]
    uif_in_pc: bool
    uif_in_effects: bool
    hard_terms_present: bool
    reach: ReachClass
    output_class: Optional[OutputClass]
    overall: PartitionClass
    depth_limited: bool

    def __post_init__(self):
        if self.depth_limited:
            if self.effect_v1 is not None or self.effect_v2 is not None or self.output_class is not None:
                raise ValueError("depth-limited records carry no effects or output class")
            if self.overall is not PartitionClass.DEPTH_LIMITED:
                raise ValueError("depth-limited records are classified DEPTH_LIMITED")
        elif self.effect_v1 is None or self.effect_v2 is None:
            raise ValueError("complete records carry both effects")


@dataclass
class Exploration:
    records: List[PartitionRecord]
    status: ExplorationStatus
    # partition index -> exact solver model of the inputs, for NEQ partitions
    witnesses: Dict[int, Dict[str, Fraction]] = field(default_factory=dict)
    # NEQ-queries of partitions the output classification could not settle
    pending_neq_queries: List[Formula] = field(default_factory=list)
    solver_queries: int = 0
    # seconds spent classifying finished paths, a share of the exploration time
    classification_time: float = 0.0


class ClockedSolver:
    """Solver facade that enforces the run deadline before each query."""

    def __init__(self, solver, deadline: Optional[float]):
        self.solver = solver
        self.deadline = deadline
        self.queries = 0

    def tick(self):
        if self.deadline is not None and time.monotonic() >= self.deadline:
            raise DeadlineHit

    def check(self, f: Formula):
        self.tick()
        self.queries += 1
        return self.solver.check(f, self.deadline) if self.deadline is not None else self.solver.check(f)


# ---------------------------------------------------------------------------
# Path execution
# ---------------------------------------------------------------------------


class _Fork(Exception):
    def __init__(self, cond: Formula):
        self.cond = cond


class _DepthLimit(Exception):
    pass


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Thrown(Exception):
    def __init__(self, error: str):
        self.error = error


class _PathRun:
    """Executes the product along a prescribed choice sequence."""

    def __init__(self, unit: ProductUnit, choices: Sequence[bool], depth_limit: int, on_decision: Callable,
                 fuel: int = DEFAULT_PATH_FUEL):
        self.unit = unit
        self.choices = choices
        self.pos = 0
        self.depth_limit = depth_limit
        self.on_decision = on_decision
        self.fuel = fuel
        self.pc: List[Formula] = []
        self.decisions = 0
        self.inlined = 0
        self.lines: Tuple[Set[int], Set[int]] = (set(), set())
        self.side = 0
        self.program: Optional[A.Program] = None

    # -- driver ------------------------------------------------------------

    def run(self) -> Tuple[Effect, Effect]:
        inputs = [sym(p.name, p.ty) for p in self.unit.shared_params]
        effects = []
        for side, fn in ((0, self.unit.v1), (1, self.unit.v2)):
            self.side = side
            self.program = self.unit.program(side + 1)
            try:
                value = self.invoke(fn, inputs)
                effects.append(Effect.returned(value))
            except _Thrown as t:
                effects.append(Effect.thrown(t.error))
        return effects[0], effects[1]

    def decide(self, cond: Formula) -> bool:
        cond = simplify(cond)
        if isinstance(cond, BoolConst):
            return cond.value
        self.on_decision()
        self.decisions += 1
        if self.pos < len(self.choices):
            arm = self.choices[self.pos]
            self.pos += 1
            self.pc.append(cond if arm else negate(cond))
            return arm
        raise _Fork(cond)

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("path step budget exhausted")

    # -- statements --------------------------------------------------------

    def invoke(self, fn: A.FunctionDef, args: Sequence[Poly]) -> Poly:
        env = {p.name: _coerce(a, p.ty) for p, a in zip(fn.params, args)}
        try:
            self.block(fn.body, env)
        except _Return as r:
            return _coerce(r.value, fn.ret)
        raise AssertionError("checked function fell off its end")

    def block(self, stmts, env):
        outer = set(env)
        try:
            for s in stmts:
                self.stmt(s, env)
        finally:
            for name in list(env):
                if name not in outer:
                    del env[name]

    def stmt(self, s: A.Stmt, env):
        self.tick()
        self.lines[self.side].add(s.line)
        if isinstance(s, A.Let):
            env[s.name] = _coerce(self.expr(s.value, env), s.ty)
        elif isinstance(s, A.Assign):
            value = self.expr(s.value, env)
            if s.op != "=":
                value = self.arith(s.op[0], env[s.name], value)
            env[s.name] = _coerce(value, s.ty)
        elif isinstance(s, A.If):
            if self.decide(self.cond(s.cond, env)):
                self.block(s.then, env)
            else:
                self.block(s.other, env)
        elif isinstance(s, A.While):
            while self.decide(self.cond(s.cond, env)):
                self.tick()
                self.block(s.body, env)
        elif isinstance(s, A.For):
            outer = set(env)
            try:
                if s.init is not None:
                    self.stmt(s.init, env)
                while self.decide(self.cond(s.cond, env)):
                    self.tick()
                    self.block(s.body, env)
                    if s.update is not None:
                        self.stmt(s.update, env)
            finally:
                for name in list(env):
                    if name not in outer:
                        del env[name]
        elif isinstance(s, A.Return):
            raise _Return(self.expr(s.value, env))
        elif isinstance(s, A.Fail):
            raise _Thrown(s.error)
        else:
            raise TypeError(f"unknown statement {s!r}")

    # -- expressions -------------------------------------------------------

    def arith(self, op: str, a: Poly, b: Poly) -> Poly:
        if A.REAL in (a.ty, b.ty):
            a, b = to_real(a), to_real(b)
        if op == "+":
            return add(a, b)
        if op == "-":
            return sub(a, b)
        if op == "*":
            return mul(a, b)
        if op in ("/", "%"):
            if b.is_const:
                if b.const == 0:
                    raise _Thrown(DIV_BY_ZERO)
            elif self.decide(compare("==", b, const(0, b.ty))):
                raise _Thrown(DIV_BY_ZERO)
            if op == "%":
                return imod(a, b)
            return idiv(a, b) if a.ty == A.INT else rdiv(a, b)
        raise ValueError(f"unknown operator {op}")

    def cond(self, e: A.Expr, env) -> Formula:
        if isinstance(e, A.BoolLit):
            return TRUE if e.value else FALSE
        if isinstance(e, A.Unary) and e.op == "!":
            return negate(self.cond(e.operand, env))
        if isinstance(e, A.Binary):
            if e.op in A.BOOL_OPS:
                left = self.cond(e.left, env)
                if _may_fail(e.right):
                    # keep the short-circuit: the right operand may raise
                    if self.decide(left) != (e.op == "&&"):
                        return FALSE if e.op == "&&" else TRUE
                    return self.cond(e.right, env)
                right = self.cond(e.right, env)
                return conj(left, right) if e.op == "&&" else disj(left, right)
            if e.op in A.CMP_OPS:
                a, b = self.expr(e.left, env), self.expr(e.right, env)
                if A.REAL in (a.ty, b.ty):
                    a, b = to_real(a), to_real(b)
                return compare(e.op, a, b)
        raise TypeError(f"not a condition: {e!r}")

    def expr(self, e: A.Expr, env) -> Poly:
        if isinstance(e, A.IntLit):
            return const(e.value, A.INT)
        if isinstance(e, A.RealLit):
            return const(to_fraction(e.value), A.REAL)
        if isinstance(e, A.Var):
            return env[e.name]
        if isinstance(e, A.Unary):
            return neg(self.expr(e.operand, env))
        if isinstance(e, A.Binary):
            return self.arith(e.op, self.expr(e.left, env), self.expr(e.right, env))
        if isinstance(e, A.Ternary):
            branch = e.then if self.decide(self.cond(e.cond, env)) else e.other
            return _coerce(self.expr(branch, env), e.ty)
        if isinstance(e, A.Call):
            args = [self.expr(a, env) for a in e.args]
            if e.intrinsic:
                return intrinsic(e.name, tuple(args), e.ty)
            self.inlined += 1
            if self.inlined > self.depth_limit:
                raise _DepthLimit
            return self.invoke(self.program[e.name], args)
        if isinstance(e, A.UifApp):
            return uif(e.name, tuple(_coerce(self.expr(a, env), a.ty) for a in e.args), e.ty)
        raise TypeError(f"not a scalar expression: {e!r}")


def _coerce(p: Poly, ty: str) -> Poly:
    return to_real(p) if ty == A.REAL else p


# ---------------------------------------------------------------------------
# Exploration
# ---------------------------------------------------------------------------


def _lines(run: _PathRun) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    return tuple(sorted(run.lines[0])), tuple(sorted(run.lines[1]))


def _effect_polys(e: Effect):
    return (e.value,) if e.kind is EffectKind.RETURN else ()


def _uif_free(*objs) -> bool:
    return not any(has_uif(o) for o in objs)


def explore(unit: ProductUnit, depth_limit: int, deadline: Optional[float], solver,
            fuel: int = DEFAULT_PATH_FUEL) -> Exploration:
    """Enumerate the unit's (maybe) reachable paths as classified partition records.

    ``deadline`` is a ``time.monotonic()`` instant or None for no limit.
    """
    if depth_limit < 1:
        raise ValueError("depth_limit must be at least 1")
    clocked = solver if isinstance(solver, ClockedSolver) else ClockedSolver(solver, deadline)
    result = Exploration([], ExplorationStatus.COMPLETE)
    stack: List[Tuple[bool, ...]] = [()]

    def emit_depth_limited(pc: Formula, verdict: Verdict, run: _PathRun):
        lines = _lines(run)
        uif_pc = has_uif(pc)
        result.records.append(PartitionRecord(
            index=len(result.records) + 1, pc=pc, effect_v1=None, effect_v2=None,
            covered_v1=lines[0], covered_v2=lines[1], uif_in_pc=uif_pc, uif_in_effects=False,
            hard_terms_present=has_hard_atoms(pc), reach=reachability_from(uif_pc, verdict),
            output_class=None, overall=PartitionClass.DEPTH_LIMITED, depth_limited=True,
        ))

    try:
        while stack:
            choices = stack.pop()
            run = _PathRun(unit, choices, depth_limit, clocked.tick, fuel)
            try:
                e1, e2 = run.run()
            except _Fork as fork:
                prefix = conj(*run.pc)
                arms = []
                for arm in (True, False):
                    pc = simplify(conj(prefix, fork.cond if arm else negate(fork.cond)))
                    verdict = clocked.check(pc).value
                    if verdict is Verdict.UNSAT:
                        continue
                    if run.decisions > depth_limit:
                        emit_depth_limited(pc, verdict, run)
                    else:
                        arms.append(choices + (arm,))
                stack.extend(reversed(arms))
                continue
            except _DepthLimit:
                pc = simplify(conj(*run.pc))
                verdict = clocked.check(pc).value
                if verdict is not Verdict.UNSAT:
                    emit_depth_limited(pc, verdict, run)
                continue
            t = time.perf_counter()
            try:
                _emit_complete(result, run, e1, e2, clocked)
            finally:
                result.classification_time += time.perf_counter() - t
    except DeadlineHit:
        result.status = ExplorationStatus.DEADLINE_HIT
    result.solver_queries = clocked.queries
    return result


def _emit_complete(result: Exploration, run: _PathRun, e1: Effect, e2: Effect, solver: ClockedSolver):
    pc = simplify(conj(*run.pc))
    uif_pc = has_uif(pc)
    effect_polys = _effect_polys(e1) + _effect_polys(e2)
    uif_eff = any(has_uif(p) for p in effect_polys)
    pc_verdict = solver.check(pc)
    reach = reachability_from(uif_pc, pc_verdict.value)
    if reach is ReachClass.UNREACHABLE:
        return
    decision = decide_output(pc, e1, e2, uif_eff, solver)
    overall = overall_partition(reach, decision.output)
    index = len(result.records) + 1
    lines = _lines(run)
    result.records.append(PartitionRecord(
        index=index, pc=pc, effect_v1=e1, effect_v2=e2, covered_v1=lines[0], covered_v2=lines[1],
        uif_in_pc=uif_pc, uif_in_effects=uif_eff,
        hard_terms_present=has_hard_atoms(pc) or any(has_hard_atoms(p) for p in effect_polys),
        reach=reach, output_class=decision.output, overall=overall, depth_limited=False,
    ))
    if overall is PartitionClass.NEQ and not uif_pc and not uif_eff:
        source = decision.neq if decision.neq is not None else pc_verdict
        if source.witness is not None:
            result.witnesses[index] = dict(source.witness)
    if overall not in (PartitionClass.EQ, PartitionClass.NEQ) and decision.neq_query is not None:
        result.pending_neq_queries.append(decision.neq_query)

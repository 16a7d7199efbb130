"""Partition reachability, output equivalence, and program-level aggregation.

The table lookups (`reachability_from`, `output_from`) are pure functions
of query verdicts so they can be tested exhaustively; the solver-facing
wrappers decide which queries to issue.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .minilang.ast import REAL
from .minilang.interpreter import Effect, EffectKind
from .solver import SolverVerdict, Verdict
from .symbolic import Formula, compare, conj, to_real


class ReachClass(str, Enum):
    REACHABLE = "REACHABLE"
    MAYBE_REACHABLE = "MAYBE_REACHABLE"
    UNREACHABLE = "UNREACHABLE"


class OutputClass(str, Enum):
    EQ = "EQ"
    NEQ = "NEQ"
    MAYBE_EQ = "MAYBE_EQ"
    MAYBE_NEQ = "MAYBE_NEQ"
    UNKNOWN = "UNKNOWN"


class PartitionClass(str, Enum):
    EQ = "EQ"
    NEQ = "NEQ"
    MAYBE_EQ = "MAYBE_EQ"
    MAYBE_NEQ = "MAYBE_NEQ"
    UNKNOWN = "UNKNOWN"
    DEPTH_LIMITED = "DEPTH_LIMITED"


class ProgramClass(str, Enum):
    EQ = "EQ"
    NEQ = "NEQ"
    MAYBE_EQ = "MAYBE_EQ"
    MAYBE_NEQ = "MAYBE_NEQ"
    UNKNOWN = "UNKNOWN"
    DEPTH_LIMITED = "DEPTH_LIMITED"
    TIMEOUT = "TIMEOUT"
    ERROR = "ERROR"


# -- Reachability table ----------------------------------------------------


def reachability_from(uif_in_pc: bool, pc: Verdict) -> ReachClass:
    if pc is Verdict.UNSAT:
        return ReachClass.UNREACHABLE
    if pc is Verdict.SAT and not uif_in_pc:
        return ReachClass.REACHABLE
    return ReachClass.MAYBE_REACHABLE


def classify_reachability(pc: Formula, uif_in_pc: bool, solver) -> ReachClass:
    return reachability_from(uif_in_pc, solver.check(pc).value)


# -- Output table ------------------------------------------------------------


def needs_eq_query(uif_in_effects: bool, neq: Verdict) -> bool:
    """Whether the output table consults the EQ-query for this NEQ-query verdict."""
    if neq is Verdict.UNSAT:
        return False
    if neq is Verdict.SAT and not uif_in_effects:
        return False
    return True


def output_from(uif_in_effects: bool, neq: Verdict, eq: Optional[Verdict]) -> OutputClass:
    if neq is Verdict.UNSAT:
        return OutputClass.EQ
    if neq is Verdict.UNKNOWN:
        return {Verdict.SAT: OutputClass.MAYBE_EQ, Verdict.UNSAT: OutputClass.NEQ,
                Verdict.UNKNOWN: OutputClass.UNKNOWN}[eq]
    if not uif_in_effects:
        return OutputClass.NEQ
    return OutputClass.NEQ if eq is Verdict.UNSAT else OutputClass.MAYBE_NEQ


@dataclass(frozen=True)
class OutputDecision:
    output: OutputClass
    neq_query: Optional[Formula] = None
    neq: Optional[SolverVerdict] = None
    eq: Optional[SolverVerdict] = None


def _value(e: Effect, real: bool):
    return to_real(e.value) if real else e.value


def decide_output(pc: Formula, e1: Effect, e2: Effect, uif_in_effects: bool, solver) -> OutputDecision:
    if EffectKind.THROWN in (e1.kind, e2.kind):
        same = e1.kind is e2.kind and e1.error == e2.error
        return OutputDecision(OutputClass.EQ if same else OutputClass.NEQ)
    real = REAL in (e1.value.ty, e2.value.ty)
    v1, v2 = _value(e1, real), _value(e2, real)
    neq_query = conj(pc, compare("!=", v1, v2))
    neq = solver.check(neq_query)
    eq = None
    if needs_eq_query(uif_in_effects, neq.value):
        eq = solver.check(conj(pc, compare("==", v1, v2)))
    return OutputDecision(output_from(uif_in_effects, neq.value, eq.value if eq else None), neq_query, neq, eq)


def classify_output(pc: Formula, e1: Effect, e2: Effect, uif_in_effects: bool, solver) -> OutputClass:
    return decide_output(pc, e1, e2, uif_in_effects, solver).output


def overall_partition(reach: ReachClass, out: OutputClass) -> PartitionClass:
    if reach is ReachClass.UNREACHABLE:
        raise ValueError("unreachable partitions are never classified")
    if reach is ReachClass.MAYBE_REACHABLE and out is OutputClass.NEQ:
        return PartitionClass.MAYBE_NEQ
    return PartitionClass(out.value)


# -- program level -----------------------------------------------------------

_PRIORITY = (PartitionClass.NEQ, PartitionClass.MAYBE_NEQ, PartitionClass.UNKNOWN, PartitionClass.DEPTH_LIMITED)


def aggregate_program(partitions: Iterable[PartitionClass], complete: bool) -> ProgramClass:
    classes = [PartitionClass(p) for p in partitions]
    if not classes:
        raise ValueError("cannot aggregate an empty partition list")
    present = set(classes)
    if complete and present == {PartitionClass.EQ}:
        return ProgramClass.EQ
    if present & {PartitionClass.EQ, PartitionClass.MAYBE_EQ} and not present & {PartitionClass.NEQ,
                                                                                   PartitionClass.MAYBE_NEQ}:
        return ProgramClass.MAYBE_EQ
    for p in _PRIORITY:
        if p in present:
            return ProgramClass(p.value)
    # only reachable when incomplete and every partition is EQ/MAYBE_EQ, handled above
    raise AssertionError(f"unaggregatable partitions {sorted(present)}")

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pasda_mini.classify import (
    OutputClass, PartitionClass, ProgramClass, ReachClass, aggregate_program, classify_output,
    classify_reachability, needs_eq_query, overall_partition,
)
from pasda_mini.minilang import INT, Effect
from pasda_mini.solver import SolverVerdict, Verdict
from pasda_mini.symbolic import TRUE, const, sym

SAT, UNSAT, UNKNOWN = Verdict.SAT, Verdict.UNSAT, Verdict.UNKNOWN

# (uif present, pc-query) -> reachability
REACHABILITY_TABLE = [
    (False, SAT, ReachClass.REACHABLE),
    (False, UNSAT, ReachClass.UNREACHABLE),
    (False, UNKNOWN, ReachClass.MAYBE_REACHABLE),
    (True, SAT, ReachClass.MAYBE_REACHABLE),
    (True, UNSAT, ReachClass.UNREACHABLE),
    (True, UNKNOWN, ReachClass.MAYBE_REACHABLE),
]

# (uif present or None for "any", neq-query, eq-query or None for "any") -> output class
OUTPUT_TABLE = [
    (None, UNSAT, None, OutputClass.EQ),
    (None, UNKNOWN, SAT, OutputClass.MAYBE_EQ),
    (None, UNKNOWN, UNSAT, OutputClass.NEQ),
    (None, UNKNOWN, UNKNOWN, OutputClass.UNKNOWN),
    (False, SAT, None, OutputClass.NEQ),
    (True, SAT, SAT, OutputClass.MAYBE_NEQ),
    (True, SAT, UNSAT, OutputClass.NEQ),
    (True, SAT, UNKNOWN, OutputClass.MAYBE_NEQ),
]


class ScriptedSolver:
    """Answers queries from a fixed list, in order."""

    def __init__(self, *verdicts):
        self.verdicts = list(verdicts)
        self.calls = 0

    def check(self, f):
        v = self.verdicts[self.calls]
        self.calls += 1
        return SolverVerdict(v)


def output_table_expected(uif, neq, eq):
    hits = [out for u, n, e, out in OUTPUT_TABLE if (u is None or u == uif) and n == neq and (e is None or e == eq)]
    assert len(hits) == 1
    return hits[0]


@pytest.mark.parametrize("uif, pc, expected", REACHABILITY_TABLE)
def test_reachability_table(uif, pc, expected):
    assert classify_reachability(TRUE, uif, ScriptedSolver(pc)) is expected


@pytest.mark.parametrize("uif, neq, eq", list(itertools.product([False, True], Verdict, Verdict)))
def test_output_table_all_combinations(uif, neq, eq):
    solver = ScriptedSolver(neq, eq)
    x = sym("x", INT)
    out = classify_output(TRUE, Effect.returned(x), Effect.returned(const(1)), uif, solver)
    assert out is output_table_expected(uif, neq, eq)
    # the EQ-query is only issued where the table consults it
    assert solver.calls == (2 if needs_eq_query(uif, neq) else 1)


@pytest.mark.parametrize("e1, e2, expected", [
    (Effect.thrown("DivByZero"), Effect.thrown("DivByZero"), OutputClass.EQ),
    (Effect.thrown("DivByZero"), Effect.thrown("Range"), OutputClass.NEQ),
    (Effect.thrown("DivByZero"), Effect.returned(const(0)), OutputClass.NEQ),
])
def test_thrown_effects_compare_by_error_name(e1, e2, expected):
    solver = ScriptedSolver()
    assert classify_output(TRUE, e1, e2, False, solver) is expected
    assert solver.calls == 0


@pytest.mark.parametrize("reach, out, expected", [
    (ReachClass.REACHABLE, OutputClass.NEQ, PartitionClass.NEQ),
    (ReachClass.MAYBE_REACHABLE, OutputClass.NEQ, PartitionClass.MAYBE_NEQ),
    (ReachClass.MAYBE_REACHABLE, OutputClass.EQ, PartitionClass.EQ),
    (ReachClass.REACHABLE, OutputClass.UNKNOWN, PartitionClass.UNKNOWN),
    (ReachClass.MAYBE_REACHABLE, OutputClass.MAYBE_EQ, PartitionClass.MAYBE_EQ),
])
def test_overall_partition(reach, out, expected):
    assert overall_partition(reach, out) is expected


def test_unreachable_partitions_are_not_classified():
    with pytest.raises(ValueError):
        overall_partition(ReachClass.UNREACHABLE, OutputClass.EQ)


def reference_aggregate(classes, complete):
    """Program-level rules written out directly."""
    if complete and all(c == "EQ" for c in classes):
        return "EQ"
    some_eq = any(c in ("EQ", "MAYBE_EQ") for c in classes)
    some_neq = any(c in ("NEQ", "MAYBE_NEQ") for c in classes)
    if some_eq and not some_neq:
        return "MAYBE_EQ"
    for c in ("NEQ", "MAYBE_NEQ", "UNKNOWN", "DEPTH_LIMITED"):
        if c in classes:
            return c
    raise AssertionError(classes)


@pytest.mark.parametrize("classes, complete, expected", [
    (["EQ", "EQ"], True, ProgramClass.EQ),
    (["EQ", "EQ"], False, ProgramClass.MAYBE_EQ),
    (["EQ", "DEPTH_LIMITED"], True, ProgramClass.MAYBE_EQ),
    (["EQ", "MAYBE_NEQ", "UNKNOWN"], True, ProgramClass.MAYBE_NEQ),
    (["EQ", "NEQ", "MAYBE_NEQ"], True, ProgramClass.NEQ),
    (["UNKNOWN", "DEPTH_LIMITED"], True, ProgramClass.UNKNOWN),
    (["DEPTH_LIMITED"], True, ProgramClass.DEPTH_LIMITED),
])
def test_aggregation_examples(classes, complete, expected):
    assert aggregate_program([PartitionClass(c) for c in classes], complete) is expected


def test_aggregation_rejects_empty():
    with pytest.raises(ValueError):
        aggregate_program([], True)


@settings(max_examples=500)
@given(st.lists(st.sampled_from(list(PartitionClass)), min_size=1, max_size=12), st.booleans())
def test_aggregation_matches_reference(classes, complete):
    got = aggregate_program(classes, complete)
    assert got.value == reference_aggregate([c.value for c in classes], complete)

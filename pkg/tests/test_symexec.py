import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pasda_mini.classify import OutputClass, PartitionClass, ReachClass
from pasda_mini.minilang import EffectKind, parse, run_with_coverage
from pasda_mini.product import build_product
from pasda_mini.solver import Solver, SolverConfig
from pasda_mini.solver import simplify
from pasda_mini.symbolic import compare, const, eval_formula, eval_poly, sym
from pasda_mini.symexec import ExplorationStatus, PartitionRecord, explore
from progen import BOX, make_pair


def run(prog, a, b, depth=10, deadline=None):
    with Solver(SolverConfig()) as s:
        return explore(build_product(prog[a], prog[b], prog, prog), depth, deadline, s)


def test_tan_pair_partitions(tan_pair):
    ex = run(tan_pair, "neq_v1", "neq_v2")
    assert ex.status is ExplorationStatus.COMPLETE
    rows = [(str(r.effect_v1), str(r.effect_v2), r.covered_v1, r.covered_v2, r.reach, r.output_class, r.overall)
            for r in ex.records]
    M, R = ReachClass.MAYBE_REACHABLE, ReachClass.REACHABLE
    assert rows == [
        ("1", "2", (2,), (8,), R, OutputClass.NEQ, PartitionClass.NEQ),
        ("tan(x)", "tan(2*x)", (2, 3), (8, 9), R, OutputClass.UNKNOWN, PartitionClass.UNKNOWN),
        ("-1", "-1", (2, 3, 4), (8, 9, 10), M, OutputClass.EQ, PartitionClass.EQ),
        ("-1", "0", (2, 3, 4), (8, 9, 10), M, OutputClass.NEQ, PartitionClass.MAYBE_NEQ),
        ("0", "-1", (2, 3, 4), (8, 9, 10), M, OutputClass.NEQ, PartitionClass.MAYBE_NEQ),
        ("0", "0", (2, 3, 4), (8, 9, 10), M, OutputClass.EQ, PartitionClass.EQ),
    ]
    assert str(ex.records[0].pc) == "x <= 0"
    assert all(r.hard_terms_present for r in ex.records[2:])
    assert list(ex.witnesses) == [1]


def test_loop_pair_depth_limited_region(loop_pair):
    ex = run(loop_pair, "eq_v1", "eq_v2")
    limited = [r for r in ex.records if r.depth_limited]
    assert [str(r.pc) for r in limited] == ["x >= 11", "x == 10"]
    assert all(r.overall is PartitionClass.DEPTH_LIMITED and r.effect_v1 is None for r in limited)
    rest = [r for r in ex.records if not r.depth_limited]
    assert len(rest) == 10 and all(r.overall is PartitionClass.EQ for r in rest)


def test_depth_limit_counts_symbolic_decisions_only():
    prog = parse("""
fn f(x: int) -> int {
  let k = 3;
  if (k > 2) { k = 1; }
  if (x > 0) { return 1; }
  if (x > -5) { return 2; }
  return 3;
}""")
    # each version makes at most two symbolic decisions; the product path counts both
    assert not any(r.depth_limited for r in run(prog, "f", "f", depth=4).records)
    assert any(r.depth_limited for r in run(prog, "f", "f", depth=3).records)


def test_symbolic_division_forks_on_zero_divisor():
    prog = parse("fn f(x: int, d: int) -> int { return x / d; }")
    ex = run(prog, "f", "f")
    thrown = [r for r in ex.records if r.effect_v1.kind is EffectKind.THROWN]
    assert len(thrown) == 1 and str(thrown[0].pc) == "d == 0"


def test_deadline_in_the_past_yields_no_partitions(tan_pair):
    ex = run(tan_pair, "neq_v1", "neq_v2", deadline=time.monotonic() - 1)
    assert ex.status is ExplorationStatus.DEADLINE_HIT and ex.records == []


def test_record_validation():
    with pytest.raises(ValueError):
        PartitionRecord(1, simplify(compare(">", sym("x", "int"), const(0))), None, None, (), (), False, False,
                        False, ReachClass.REACHABLE, OutputClass.EQ, PartitionClass.DEPTH_LIMITED, True)


def _check_against_interpreter(seed, samples=40):
    p = make_pair(seed)
    old, new = parse(p.old), parse(p.new)
    with Solver(SolverConfig()) as s:
        ex = explore(build_product(old["f"], new["f"]), 10, None, s)
    assert ex.status is ExplorationStatus.COMPLETE
    rng = random.Random(seed)
    names = [pa.name for pa in old["f"].params]
    for _ in range(samples):
        inputs = [rng.randint(-BOX - 5, BOX + 5) for _ in names]
        env = {n: Fraction(v) for n, v in zip(names, inputs)}
        holding = [r for r in ex.records if eval_formula(r.pc, env)]
        # partitions are disjoint and cover every concrete input
        assert len(holding) == 1, (p.old, p.new, inputs)
        r = holding[0]
        e1, lines1 = run_with_coverage(old["f"], inputs, old)
        e2, lines2 = run_with_coverage(new["f"], inputs, new)
        if r.depth_limited:
            assert set(r.covered_v1) <= set(lines1) and set(r.covered_v2) <= set(lines2)
            continue
        assert r.covered_v1 == lines1 and r.covered_v2 == lines2
        for sym_e, conc in ((r.effect_v1, e1), (r.effect_v2, e2)):
            assert sym_e.kind is conc.kind
            if conc.kind is EffectKind.RETURN:
                assert eval_poly(sym_e.value, env) == conc.value
            else:
                assert sym_e.error == conc.error


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_partitions_are_disjoint_and_coverage_is_sound(seed):
    _check_against_interpreter(seed)

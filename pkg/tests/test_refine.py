import pytest

from pasda_mini.bench import bundled_benchmark
from pasda_mini.classify import PartitionClass, ProgramClass
from pasda_mini.diffmatch import UifSite
from pasda_mini.minilang import INT, parse, parse_file
from pasda_mini.refine import (
    STEPS, ConfigError, IterationResult, Mode, RunConfig, StepTimer, reported_index, run_pasda, select_uif,
)
from pasda_mini.solver import Solver
from pasda_mini.symbolic import compare, const, sym, uif


def site(n, occurrences=(1, 1), loop_depth=0, nonlinear=0):
    return UifSite(f"uif_{n}", f"s{n}", (), ("x",), (INT,), "a", INT, occurrences, loop_depth, nonlinear)


def test_refinement_prefers_sites_with_different_occurrence_counts():
    a, b = site(1, (2, 1), loop_depth=3), site(2, (1, 1))
    with Solver() as s:
        assert select_uif([b, a], (None, None), s) == "uif_1"


def test_h3_orders_by_loop_depth_then_nonlinearity():
    with Solver() as s:
        assert select_uif([site(1, loop_depth=2, nonlinear=3), site(2)], (None, None), s) == "uif_2"
        assert select_uif([site(1, nonlinear=2), site(2, nonlinear=1)], (None, None), s) == "uif_2"


def test_single_candidate():
    with Solver() as s:
        assert select_uif([site(4)], (None, None), s) == "uif_4"
    with pytest.raises(ValueError):
        select_uif([], (None, None), None)


def test_query_heuristic_marks_uif_whose_fixed_value_settles_the_queries():
    x = sym("x", INT)
    # uif_2 - x != 1 is settled by picking a value for uif_2; uif_1 cancels out
    q = compare("!=", uif("uif_2", (x,), INT), const(1) + x)
    with Solver() as s:
        assert select_uif([site(1), site(2, nonlinear=4)], (None, None), s, [q]) == "uif_2"


def _it(n, cls, timed_out=False, partitions=1):
    return IterationResult(n, [object()] * partitions, cls, [site(1)] if n > 1 else [], None, 0.0, timed_out)


@pytest.mark.parametrize("iterations, expected", [
    ([_it(1, ProgramClass.MAYBE_EQ)], 0),
    ([_it(1, ProgramClass.UNKNOWN, timed_out=True)], 0),
    ([_it(1, ProgramClass.UNKNOWN), _it(2, ProgramClass.EQ)], 1),
    ([_it(1, ProgramClass.UNKNOWN), _it(2, ProgramClass.MAYBE_NEQ, timed_out=True)], 0),
    ([_it(1, ProgramClass.UNKNOWN), _it(2, ProgramClass.NEQ, timed_out=True)], 1),
    ([_it(1, ProgramClass.UNKNOWN), _it(2, ProgramClass.MAYBE_NEQ), _it(3, ProgramClass.UNKNOWN, True)], 1),
])
def test_reporting_rule(iterations, expected):
    assert reported_index(iterations) == expected


def test_iteration_one_has_no_active_uifs():
    with pytest.raises(ValueError):
        IterationResult(1, [], ProgramClass.EQ, [site(1)], None, 0.0, False)


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(timeout=0)
    with pytest.raises(ConfigError):
        RunConfig(depth_limit=0)
    assert RunConfig(mode="first-iteration-only").mode is Mode.FIRST_ITERATION_ONLY


def test_step_timer_partitions_wall_time():
    t = StepTimer()
    for step in STEPS:
        t.switch(step)
    total = t.finish()
    assert sum(t.totals.values()) == pytest.approx(total)


def test_loop_pair_is_maybe_eq(loop_pair):
    r = run_pasda(loop_pair["eq_v1"], loop_pair["eq_v2"], RunConfig(), loop_pair, loop_pair)
    assert r.verdict is ProgramClass.MAYBE_EQ
    # nothing matches between the two versions, so there is nothing to abstract
    assert len(r.iterations) == 1


def test_tan_pair_is_neq_in_first_iteration(tan_pair):
    r = run_pasda(tan_pair["neq_v1"], tan_pair["neq_v2"], RunConfig(), tan_pair, tan_pair)
    assert r.verdict is ProgramClass.NEQ and r.reported_iteration == 1
    assert [w.partition for w in r.witnesses] == [1] and r.witnesses[0].differs


def test_identical_linear_function_is_eq():
    prog = parse("fn f(x: int, y: int) -> int { let a = 3 * x - y; return a + 7; }")
    r = run_pasda(prog["f"], prog["f"], RunConfig())
    assert r.verdict is ProgramClass.EQ and len(r.iterations) == 1


def test_tiny_timeout_is_timeout(tan_pair):
    r = run_pasda(tan_pair["neq_v1"], tan_pair["neq_v2"], RunConfig(timeout=1e-3 / 1000), tan_pair, tan_pair)
    assert r.verdict is ProgramClass.TIMEOUT


def test_signature_mismatch_reports_neq():
    prog = parse("fn f(x: int) -> int { return x; } fn g(x: real) -> int { return 1; }")
    r = run_pasda(prog["f"], prog["g"], RunConfig())
    assert r.verdict is ProgramClass.NEQ and r.reason.startswith("signature")


def test_internal_failure_reports_error():
    prog = parse("fn f(x: int) -> int { while (true) { x += 1; } return x; }")
    r = run_pasda(prog["f"], prog["f"], RunConfig())
    assert r.verdict is ProgramClass.ERROR and "FuelExhausted" in r.reason


def test_best_effort_off_downgrades_maybe_results(loop_pair):
    r = run_pasda(loop_pair["eq_v1"], loop_pair["eq_v2"], RunConfig(best_effort=False), loop_pair, loop_pair)
    assert r.verdict is ProgramClass.UNKNOWN
    assert any(p.overall is PartitionClass.EQ for p in r.partitions)


def _case(name):
    d = bundled_benchmark() / name
    old, new = parse_file(d / "oldV.mini"), parse_file(d / "newV.mini")
    return old["snippet"], new["snippet"], old, new


def test_refinement_loop_proves_eq_after_refining():
    v1, v2, p1, p2 = _case("refinement_needed_eq")
    r = run_pasda(v1, v2, RunConfig(), p1, p2)
    classes = [it.program_class for it in r.iterations]
    assert classes == [ProgramClass.UNKNOWN, ProgramClass.MAYBE_NEQ, ProgramClass.EQ]
    assert r.verdict is ProgramClass.EQ and r.reported_iteration == 3
    assert r.iterations[1].refined_uif == "uif_2"


@pytest.mark.parametrize("name", [p.name for p in sorted(bundled_benchmark().iterdir())])
def test_iteration_invariants(name):
    r = run_pasda(*_case(name)[:2], RunConfig(), *_case(name)[2:])
    n_sites = max((len(it.active_uifs) for it in r.iterations), default=0)
    assert len(r.iterations) <= 1 + n_sites
    for it in r.iterations:
        undecided = it.program_class not in (ProgramClass.EQ, ProgramClass.NEQ)
        assert (it.refined_uif is not None) == (undecided and bool(it.active_uifs))
    # one UIF fewer per iteration after the second
    sizes = [len(it.active_uifs) for it in r.iterations[1:]]
    assert all(b == a - 1 for a, b in zip(sizes, sizes[1:]))
    assert set(r.timings) == set(STEPS)
    assert sum(r.timings.values()) == pytest.approx(r.total_time, rel=0.05)


def test_first_iteration_only_mode_stops_after_one_iteration():
    v1, v2, p1, p2 = _case("uif_provable_eq")
    r = run_pasda(v1, v2, RunConfig(mode=Mode.FIRST_ITERATION_ONLY), p1, p2)
    assert len(r.iterations) == 1 and r.verdict is ProgramClass.UNKNOWN
    assert run_pasda(v1, v2, RunConfig(), p1, p2).verdict is ProgramClass.EQ

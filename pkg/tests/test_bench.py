import shutil

import pytest

from pasda_mini.bench import CaseResult, bundled_benchmark, discover_cases, load_case, run_bench, CaseError
from pasda_mini.classify import ProgramClass
from pasda_mini.refine import RunConfig


def test_bundled_benchmark_has_twelve_labeled_cases():
    cases = [load_case(p) for p in discover_cases(bundled_benchmark())]
    assert len(cases) == 12
    assert sorted(c.expected for c in cases).count("EQ") == 6


@pytest.fixture(scope="module")
def summary():
    return run_bench(bundled_benchmark(), RunConfig(timeout=60))


def test_summary_counts_sum_to_case_count(summary):
    assert summary.total == len(summary.cases) == 12
    assert summary.median_runtime <= max(c.runtime for c in summary.cases)


def test_no_cross_misclassification(summary):
    assert summary.cross_misclassifications == []


def test_table_layout(summary):
    lines = summary.table().splitlines()
    assert lines[0].split()[0] == "expected"
    assert [l.split()[0] for l in lines[1:]] == ["EQ", "NEQ"]


def test_malformed_case_is_error_and_harness_continues(tmp_path):
    good = tmp_path / "good"
    shutil.copytree(bundled_benchmark() / "commuted_eq", good)
    (tmp_path / "missing_files").mkdir()
    bad_label = tmp_path / "bad_label"
    shutil.copytree(bundled_benchmark() / "commuted_eq", bad_label)
    (bad_label / "expected").write_text("MAYBE\n")
    broken = tmp_path / "broken"
    shutil.copytree(bundled_benchmark() / "commuted_eq", broken)
    (broken / "newV.mini").write_text("fn snippet(a: int) -> int { return ; }")
    s = run_bench(tmp_path, RunConfig(timeout=10))
    verdicts = {c.name: c.verdict for c in s.cases}
    assert verdicts == {"bad_label": ProgramClass.ERROR, "broken": ProgramClass.ERROR, "good": ProgramClass.EQ,
                        "missing_files": ProgramClass.ERROR}
    assert s.total == 4


def test_single_identical_case(tmp_path):
    case = tmp_path / "same"
    case.mkdir()
    src = (bundled_benchmark() / "helper_inline_eq" / "oldV.mini").read_text()
    (case / "oldV.mini").write_text(src)
    (case / "newV.mini").write_text(src)
    (case / "expected").write_text("EQ\n")
    s = run_bench(tmp_path, RunConfig(timeout=10))
    assert s.counts == {"EQ": {"EQ": 1}}


def test_custom_function_name(tmp_path):
    case = tmp_path / "named"
    case.mkdir()
    (case / "oldV.mini").write_text("fn h(x: int) -> int { return x + 1; }")
    (case / "newV.mini").write_text("fn h(x: int) -> int { return 1 + x; }")
    (case / "expected").write_text("EQ")
    (case / "fn").write_text("h\n")
    assert run_bench(tmp_path, RunConfig(timeout=10)).cases[0].verdict is ProgramClass.EQ


def test_parallel_jobs_give_same_verdicts(summary):
    par = run_bench(bundled_benchmark(), RunConfig(timeout=60), jobs=3)
    assert [(c.name, c.verdict) for c in par.cases] == [(c.name, c.verdict) for c in summary.cases]


def test_cross_misclassification_rules():
    assert CaseResult("a", "NEQ", ProgramClass.EQ, 0.0).cross_misclassified
    assert not CaseResult("b", "EQ", ProgramClass.NEQ, 0.0).cross_misclassified  # no witness
    assert not CaseResult("c", "EQ", ProgramClass.UNKNOWN, 0.0).cross_misclassified
    with pytest.raises(CaseError):
        load_case("/nonexistent")

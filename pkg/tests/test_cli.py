import json

import pytest

from pasda_mini.bench import bundled_benchmark
from pasda_mini.cli import EXIT_CODES, main
from pasda_mini.classify import ProgramClass
from conftest import FIXTURES

L2 = bundled_benchmark() / "tan_scale_neq"


def test_check_tan_pair_exits_1(tmp_path):
    out = tmp_path / "r.jsonl"
    code = main(["check", str(L2 / "oldV.mini"), str(L2 / "newV.mini"), "--fn", "snippet", "--timeout", "300",
                 "--depth-limit", "10", "--solver", "internal", "--report", str(out)])
    assert code == 1
    lines = out.read_text().splitlines()
    assert json.loads(lines[-1])["verdict"] == "NEQ"


def test_check_identical_linear_function_exits_0(tmp_path, capsys):
    src = tmp_path / "a.mini"
    src.write_text("fn f(x: int, y: int) -> int { return 2 * x + y; }")
    assert main(["check", str(src), str(src), "--fn", "f", "--solver", "internal"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0])["schema"] == "pasda-mini/1"
    assert json.loads(lines[-1])["verdict"] == "EQ"


def test_check_csv(capsys):
    main(["check", str(L2 / "oldV.mini"), str(L2 / "newV.mini"), "--fn", "snippet", "--solver", "internal", "--csv"])
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("#,path_condition") and len(out) == 7


@pytest.mark.parametrize("argv", [
    ["check", "a.mini", "b.mini"],
    ["check", "/nonexistent/a.mini", "/nonexistent/b.mini", "--fn", "f"],
    ["check", str(L2 / "oldV.mini"), str(L2 / "newV.mini"), "--fn", "nope"],
    ["check", str(L2 / "oldV.mini"), str(L2 / "newV.mini"), "--fn", "snippet", "--timeout", "0"],
    ["check", str(L2 / "oldV.mini"), str(L2 / "newV.mini"), "--fn", "snippet", "--mode", "bogus"],
    [],
])
def test_usage_errors_exit_4(argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 4


def test_external_solver_missing_is_usage_error(monkeypatch):
    monkeypatch.setenv("PATH", "")
    monkeypatch.delenv("PASDA_SOLVER_BIN", raising=False)
    argv = ["check", str(L2 / "oldV.mini"), str(L2 / "newV.mini"), "--fn", "snippet", "--solver", "external"]
    assert main(argv) == 4


def test_invalid_program_exits_3(tmp_path):
    bad = tmp_path / "bad.mini"
    bad.write_text("fn f(x: int) -> int { return x +; }")
    assert main(["check", str(bad), str(bad), "--fn", "f"]) == 3


def test_timeout_exits_2():
    argv = ["check", str(FIXTURES / "tan_pair.mini"), str(FIXTURES / "tan_pair.mini"), "--fn", "neq_v1",
            "--timeout", "0.0000001", "--solver", "internal"]
    assert main(argv) == 2


def test_exit_code_table_covers_every_verdict():
    assert set(EXIT_CODES) == set(ProgramClass)


def test_bench_empty_directory_exits_4(tmp_path):
    assert main(["bench", str(tmp_path)]) == 4


def test_bench_writes_reports(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["bench", "--solver", "internal", "--report", str(out), "--timeout", "60"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert len(summary["cases"]) == 12 and summary["cross_misclassifications"] == []
    assert (out / "tan_scale_neq.jsonl").is_file()
    assert "expected" in capsys.readouterr().out


def test_version(capsys):
    assert main(["version"]) == 0
    assert "pasda-mini/1" in capsys.readouterr().out

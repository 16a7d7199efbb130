"""Command line: ``pasda check``, ``pasda bench``, ``pasda version``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .bench import bundled_benchmark, discover_cases, run_bench
from .classify import ProgramClass
from .minilang import MiniLangError, parse_file
from .refine import ConfigError, Mode, RunConfig, run_pasda
from .report import SCHEMA_VERSION, write_csv, write_jsonl
from .solver import SolverConfig, find_solver_binary, resolve_backend

EXIT_USAGE = 4

EXIT_CODES = {
    ProgramClass.EQ: 0,
    ProgramClass.MAYBE_EQ: 0,
    ProgramClass.NEQ: 1,
    ProgramClass.MAYBE_NEQ: 1,
    ProgramClass.UNKNOWN: 2,
    ProgramClass.DEPTH_LIMITED: 2,
    ProgramClass.TIMEOUT: 2,
    ProgramClass.ERROR: 3,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_options(p: argparse.ArgumentParser, default_timeout: float):
    p.add_argument("--timeout", type=float, default=default_timeout, help="global wall-clock budget in seconds")
    p.add_argument("--depth-limit", type=int, default=10, help="branch decisions per path (default 10)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.PASDA.value)
    p.add_argument("--no-best-effort", action="store_true", help="report MAYBE_EQ/MAYBE_NEQ as UNKNOWN")
    p.add_argument("--solver", choices=["external", "internal", "auto"], default="auto")
    p.add_argument("--solver-bin", help="SMT-LIB solver binary (fallback: $PASDA_SOLVER_BIN, then z3 on PATH)")
    p.add_argument("--log-queries", nargs="?", const="queries.smt2", metavar="PATH",
                   help="append every external solver query to PATH (default queries.smt2)")
    p.add_argument("--seed", type=int, default=0, help="seed for the internal backend's search")
    p.add_argument("--csv", action="store_true", help="print a CSV table to stdout")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pasda", description="Partition-based semantic differencing of MiniLang functions.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    check = sub.add_parser("check", help="compare one function across two versions")
    check.add_argument("v1", help="old version (.mini)")
    check.add_argument("v2", help="new version (.mini)")
    check.add_argument("--fn", required=True, help="function to compare (must exist in both files)")
    check.add_argument("--report", help="write the JSON Lines report here (default: stdout)")
    _add_run_options(check, default_timeout=300.0)

    bench = sub.add_parser("bench", help="run a directory of benchmark cases")
    bench.add_argument("directory", nargs="?", help="case directory (default: the bundled mini-benchmark)")
    bench.add_argument("--report", help="directory for summary.json and per-case reports")
    bench.add_argument("--jobs", type=int, default=1, help="cases analyzed in parallel processes")
    _add_run_options(bench, default_timeout=60.0)

    sub.add_parser("version", help="print the tool and report schema versions")
    return parser


def _config(args) -> RunConfig:
    if args.solver == "external" and find_solver_binary(args.solver_bin) is None:
        raise UsageError("--solver external needs --solver-bin, $PASDA_SOLVER_BIN, or z3 on PATH")
    solver = SolverConfig(
        backend=resolve_backend(args.solver, args.solver_bin),
        timeout_ms=max(1, int(min(args.timeout, 30.0) * 1000)),
        seed=args.seed,
        solver_bin=args.solver_bin,
        query_log=args.log_queries,
    )
    try:
        return RunConfig(args.depth_limit, args.timeout, Mode(args.mode), solver, not args.no_best_effort)
    except ConfigError as e:
        raise UsageError(str(e)) from None


def _load(path: str):
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")
    return parse_file(path)


def cmd_check(args) -> int:
    cfg = _config(args)
    old, new = _load(args.v1), _load(args.v2)
    for path, prog in ((args.v1, old), (args.v2, new)):
        if args.fn not in prog:
            raise UsageError(f"function {args.fn!r} not found in {path}")
    report = run_pasda(old[args.fn], new[args.fn], cfg, old, new)
    run = {"v1": args.v1, "v2": args.v2, "fn": args.fn}
    if args.report:
        with open(args.report, "w") as f:
            write_jsonl(report, f, run)
    if args.csv:
        write_csv(report, sys.stdout)
    elif not args.report:
        write_jsonl(report, sys.stdout, run)
    detail = f" ({report.reason})" if report.reason else ""
    print(f"{args.fn}: {report.verdict.value}{detail} [iteration {report.reported_iteration}, "
          f"{report.total_time:.2f}s]", file=sys.stderr)
    return EXIT_CODES[report.verdict]


def cmd_bench(args) -> int:
    cfg = _config(args)
    root = Path(args.directory) if args.directory else bundled_benchmark()
    if not discover_cases(root):
        raise UsageError(f"no case directories under {root}")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    summary = run_bench(root, cfg, args.jobs)
    if args.report:
        out = Path(args.report)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.json").write_text(json.dumps(summary.to_json(), indent=2) + "\n")
        for case in summary.cases:
            if case.report is not None:
                with open(out / f"{case.name}.jsonl", "w") as f:
                    write_jsonl(case.report, f, {"case": case.name, "expected": case.expected})
    if args.csv:
        print("case,expected,verdict,runtime")
        for c in summary.cases:
            print(f"{c.name},{c.expected or ''},{c.verdict.value},{c.runtime:.4f}")
    else:
        for c in summary.cases:
            note = f"  ({c.error})" if c.error else ""
            print(f"{c.name:28} expected {c.expected or '-':4} got {c.verdict.value:13} {c.runtime:7.2f}s{note}")
        print()
        print(summary.table())
        print(f"\nmean {summary.mean_runtime:.2f}s, median {summary.median_runtime:.2f}s")
    crossed = summary.cross_misclassifications
    if crossed:
        print(f"cross-misclassified: {', '.join(crossed)}", file=sys.stderr)
        return 1
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    if args.command == "version":
        print(f"pasda-mini {__version__} (report schema {SCHEMA_VERSION})")
        return 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return cmd_check(args) if args.command == "check" else cmd_bench(args)
    except UsageError as e:
        print(f"pasda: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MiniLangError as e:
        print(f"pasda: error: {e}", file=sys.stderr)
        return EXIT_CODES[ProgramClass.ERROR]

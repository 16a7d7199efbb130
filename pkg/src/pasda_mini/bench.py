"""Desk-scale benchmark harness over directories of version pairs.

A case directory holds ``oldV.mini``, ``newV.mini`` and ``expected``
(``EQ`` or ``NEQ``).  An optional ``fn`` file names the function to
compare; the default is ``snippet``.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .classify import PartitionClass, ProgramClass, ReachClass
from .minilang import MiniLangError, parse_file
from .refine import RunConfig, run_pasda
from .report import RunReport

DEFAULT_FN = "snippet"
EXPECTED = ("EQ", "NEQ")
UNLABELED = "UNLABELED"
VERDICT_ORDER = tuple(c.value for c in ProgramClass)


class CaseError(ValueError):
    """A case directory is missing files or holds invalid programs."""


def bundled_benchmark() -> Path:
    return Path(str(resources.files("pasda_mini") / "benchmarks"))


def discover_cases(root) -> List[Path]:
    root = Path(root)
    if not root.is_dir():
        return []
    return sorted(p for p in root.iterdir() if p.is_dir())


@dataclass(frozen=True)
class BenchCase:
    name: str
    path: Path
    expected: str
    fn: str


def load_case(path) -> BenchCase:
    path = Path(path)
    for name in ("oldV.mini", "newV.mini", "expected"):
        if not (path / name).is_file():
            raise CaseError(f"{path.name}: missing {name}")
    expected = (path / "expected").read_text().strip().upper()
    if expected not in EXPECTED:
        raise CaseError(f"{path.name}: expected must be EQ or NEQ, got {expected!r}")
    fn_file = path / "fn"
    fn = fn_file.read_text().strip() if fn_file.is_file() else DEFAULT_FN
    return BenchCase(path.name, path, expected, fn)


@dataclass
class CaseResult:
    name: str
    expected: Optional[str]
    verdict: ProgramClass
    runtime: float
    report: Optional[RunReport] = None
    error: Optional[str] = None

    @property
    def cross_misclassified(self) -> bool:
        """An EQ case refuted by a reachable witness, or a NEQ case proven EQ."""
        if self.expected == "NEQ":
            return self.verdict is ProgramClass.EQ
        if self.expected == "EQ" and self.verdict in (ProgramClass.NEQ, ProgramClass.MAYBE_NEQ):
            return self.report is not None and any(
                r.index == w.partition and r.reach is ReachClass.REACHABLE and r.overall is PartitionClass.NEQ
                for w in self.report.witnesses for r in self.report.partitions
            )
        return False


def run_case(path, cfg: RunConfig) -> CaseResult:
    started = time.perf_counter()
    name = Path(path).name
    expected = None
    try:
        case = load_case(path)
        expected = case.expected
        old = parse_file(case.path / "oldV.mini")
        new = parse_file(case.path / "newV.mini")
        if case.fn not in old or case.fn not in new:
            raise CaseError(f"{name}: function {case.fn!r} missing from a version")
    except (CaseError, MiniLangError, OSError) as e:
        return CaseResult(name, expected, ProgramClass.ERROR, time.perf_counter() - started, error=str(e))
    report = run_pasda(old[case.fn], new[case.fn], cfg, old, new)
    return CaseResult(name, expected, report.verdict, time.perf_counter() - started, report, report.reason)


@dataclass
class BenchSummary:
    cases: List[CaseResult]
    counts: Dict[str, Dict[str, int]] = field(default_factory=dict)
    mean_runtime: float = 0.0
    median_runtime: float = 0.0

    @classmethod
    def build(cls, cases: Sequence[CaseResult]) -> "BenchSummary":
        counts: Dict[str, Dict[str, int]] = {}
        for c in cases:
            row = counts.setdefault(c.expected or UNLABELED, {})
            row[c.verdict.value] = row.get(c.verdict.value, 0) + 1
        times = [c.runtime for c in cases]
        return cls(list(cases), counts, statistics.fmean(times) if times else 0.0,
                   statistics.median(times) if times else 0.0)

    @property
    def total(self) -> int:
        return sum(sum(row.values()) for row in self.counts.values())

    @property
    def cross_misclassifications(self) -> List[str]:
        return [c.name for c in self.cases if c.cross_misclassified]

    def to_json(self) -> dict:
        return {
            "cases": [
                {"name": c.name, "expected": c.expected, "verdict": c.verdict.value, "runtime": c.runtime,
                 "error": c.error}
                for c in self.cases
            ],
            "counts": self.counts,
            "mean_runtime": self.mean_runtime,
            "median_runtime": self.median_runtime,
            "cross_misclassifications": self.cross_misclassifications,
        }

    def table(self) -> str:
        """Expected class by verdict, one row per expected class."""
        cols = [v for v in VERDICT_ORDER if any(v in row for row in self.counts.values())]
        rows = [("expected",) + tuple(cols) + ("total",)]
        for exp in sorted(self.counts):
            row = self.counts[exp]
            rows.append((exp,) + tuple(str(row.get(v, 0)) for v in cols) + (str(sum(row.values())),))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows)


def run_bench(root, cfg: RunConfig, jobs: int = 1) -> BenchSummary:
    paths = discover_cases(root)
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_case, paths, [cfg] * len(paths)))
    else:
        results = [run_case(p, cfg) for p in paths]
    return BenchSummary.build(results)

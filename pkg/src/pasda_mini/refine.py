"""Iteration driver: instrument, explore, classify, aggregate, refine.

Iteration 1 analyzes the unmodified pair.  When it cannot decide, iteration
2 abstracts every UIF site, and each later iteration refines (un-abstracts)
one site chosen by :func:`select_uif`.  All iterations share one wall-clock
deadline.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import __version__
from .classify import ProgramClass, aggregate_program
from .diffmatch import RefinementState, Side, UifSite, abstract, find_sites, match_unchanged
from .minilang import ast as A
from .minilang.interpreter import Effect, effects_equal, interpret
from .product import SignatureMismatch, build_product
from .report import RunReport, WitnessReport
from .solver import Solver, SolverConfig, Verdict
from .symbolic import Formula, Uif, atoms_of, has_uif, sym, substitute
from .symexec import ClockedSolver, DeadlineHit, Exploration, ExplorationStatus, PartitionRecord, explore

log = logging.getLogger(__name__)

STEPS = (
    "initialization",
    "instrumentation",
    "symbolic_execution",
    "partition_classification",
    "program_classification",
    "refinement",
    "finalization",
)

QUERY_HEURISTIC_NOTE = ("refinement query heuristic approximated: each UIF's applications in the pending "
                        "NEQ-queries replaced by one shared fresh symbol")


class ConfigError(ValueError):
    """Invalid run configuration."""


class Mode(str, Enum):
    PASDA = "pasda"
    FIRST_ITERATION_ONLY = "first-iteration-only"


@dataclass(frozen=True)
class RunConfig:
    depth_limit: int = 10
    timeout: float = 60.0
    mode: Mode = Mode.PASDA
    solver: SolverConfig = field(default_factory=SolverConfig)
    best_effort: bool = True

    def __post_init__(self):
        if not self.timeout > 0:
            raise ConfigError("timeout must be positive")
        if self.depth_limit < 1:
            raise ConfigError("depth limit must be at least 1")
        object.__setattr__(self, "mode", Mode(self.mode))

    def echo(self) -> Dict[str, object]:
        solver = {k: (v.value if isinstance(v, Enum) else v) for k, v in asdict(self.solver).items()}
        if solver["solver_args"] is not None:
            solver["solver_args"] = list(solver["solver_args"])
        return {
            "depth_limit": self.depth_limit,
            "timeout": self.timeout,
            "mode": self.mode.value,
            "best_effort": self.best_effort,
            "solver": solver,
        }


@dataclass
class IterationResult:
    iteration: int
    partitions: List[PartitionRecord]
    program_class: ProgramClass
    active_uifs: List[UifSite]
    refined_uif: Optional[str]
    wall_time: float
    timed_out: bool

    def __post_init__(self):
        if self.iteration < 1:
            raise ValueError("iterations are numbered from 1")
        if self.iteration == 1 and self.active_uifs:
            raise ValueError("iteration 1 runs without abstraction")


class StepTimer:
    """Attributes every instant between start and finish to exactly one step."""

    def __init__(self):
        self.totals: Dict[str, float] = {s: 0.0 for s in STEPS}
        self.start = time.perf_counter()
        self._mark = self.start
        self._current = STEPS[0]
        self.end: Optional[float] = None

    def switch(self, step: str):
        if step not in self.totals:
            raise KeyError(step)
        now = time.perf_counter()
        self.totals[self._current] += now - self._mark
        self._mark = now
        self._current = step

    def move(self, src: str, dst: str, seconds: float):
        """Reassign already-recorded time (e.g. classification done during exploration)."""
        seconds = min(seconds, self.totals[src])
        self.totals[src] -= seconds
        self.totals[dst] += seconds

    def finish(self) -> float:
        self.switch(self._current)
        self.end = self._mark
        return self.end - self.start


# ---------------------------------------------------------------------------
# Refinement heuristics
# ---------------------------------------------------------------------------


def _query_candidates(candidates: Sequence[UifSite], pending: Sequence[Formula], solver) -> List[UifSite]:
    out = []
    for site in candidates:
        if not any(site.id in (a.name for a in atoms_of(q) if isinstance(a, Uif)) for q in pending):
            continue
        fresh = sym(f"__{site.id}", site.ty)
        replaced = []
        for q in pending:
            mapping = {a: fresh for a in atoms_of(q) if isinstance(a, Uif) and a.name == site.id}
            replaced.append(substitute(q, mapping))
        verdicts = [solver.check(q).value for q in replaced]
        if all(v is Verdict.UNSAT for v in verdicts):
            out.append(site)
        elif all(v is Verdict.SAT for v in verdicts) and not any(has_uif(q) for q in replaced):
            out.append(site)
    return out


def select_uif(candidates: Sequence[UifSite], programs: Tuple[A.FunctionDef, A.FunctionDef], solver,
               pending_queries: Sequence[Formula] = ()) -> str:
    """Pick the UIF site to refine next.

    Sites nominate themselves if fixing their value settles the pending
    NEQ-queries, or if their occurrence counts differ between versions.
    Among the nominees (or all sites, if none), the lowest loop depth and
    nonlinear count wins, ties broken by site number.
    """
    if not candidates:
        raise ValueError("no UIF sites to choose from")
    try:
        settling = _query_candidates(candidates, pending_queries, solver) if pending_queries else []
    except DeadlineHit:
        settling = []
    uneven = [s for s in candidates if s.occurrences[0] != s.occurrences[1]]
    marked = {s.id for s in settling} | {s.id for s in uneven}
    pool = [s for s in candidates if s.id in marked] or list(candidates)
    return min(pool, key=lambda s: (s.rank, int(s.id.rsplit("_", 1)[1]))).id


# ---------------------------------------------------------------------------
# Reporting helpers
# ---------------------------------------------------------------------------


def reported_index(iterations: Sequence[IterationResult]) -> int:
    """Position in ``iterations`` whose data is reported."""
    last = iterations[-1]
    if not last.timed_out or len(iterations) == 1 or last.program_class is ProgramClass.NEQ:
        return len(iterations) - 1
    return len(iterations) - 2


def concrete_inputs(params: Sequence[A.Param], model: Mapping[str, Fraction]) -> List[object]:
    values = []
    for p in params:
        v = Fraction(model.get(p.name, 0))
        if p.ty == A.INT:
            if v.denominator != 1:
                raise ValueError(f"non-integral witness for int parameter {p.name}")
            values.append(int(v))
        else:
            values.append(float(v))
    return values


def replay_witness(v1: A.FunctionDef, v2: A.FunctionDef, inputs: Sequence[object],
                   program_v1: Optional[A.Program] = None, program_v2: Optional[A.Program] = None
                   ) -> Tuple[Effect, Effect]:
    # v2 receives the same values positionally under its own parameter names
    return interpret(v1, inputs, program_v1), interpret(v2, inputs, program_v2)


def _witness_reports(unit_v1, unit_v2, program_v1, program_v2, exploration: Exploration) -> List[WitnessReport]:
    out = []
    for index, model in sorted(exploration.witnesses.items()):
        try:
            inputs = concrete_inputs(unit_v1.params, model)
            e1, e2 = replay_witness(unit_v1, unit_v2, inputs, program_v1, program_v2)
        except Exception as e:  # replay must never sink the report
            log.warning("witness replay for partition %d failed: %s", index, e)
            continue
        names = [p.name for p in unit_v1.params]
        out.append(WitnessReport(index, dict(zip(names, inputs)), e1, e2, not effects_equal(e1, e2)))
    return out


_DOWNGRADE = {ProgramClass.MAYBE_EQ: ProgramClass.UNKNOWN, ProgramClass.MAYBE_NEQ: ProgramClass.UNKNOWN}


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def run_pasda(v1: A.FunctionDef, v2: A.FunctionDef, cfg: RunConfig = RunConfig(),
              program_v1: Optional[A.Program] = None, program_v2: Optional[A.Program] = None) -> RunReport:
    """Check ``v1`` and ``v2`` for equivalence and report the chosen iteration."""
    timer = StepTimer()
    deadline = time.monotonic() + cfg.timeout
    report = RunReport(tool_version=__version__, config=cfg.echo(), verdict=ProgramClass.ERROR)
    iterations: List[IterationResult] = []
    explorations: List[Exploration] = []
    try:
        with Solver(cfg.solver) as solver:
            try:
                build_product(v1, v2, program_v1, program_v2)
            except SignatureMismatch as e:
                report.verdict = ProgramClass.NEQ
                report.reason = f"signature: {e}"
                return report
            matches = match_unchanged(v1, v2)
            all_sites = find_sites(matches)
            clocked = ClockedSolver(solver, deadline)
            state = RefinementState()
            while True:
                started = time.perf_counter()
                timer.switch("instrumentation")
                a1, sites = abstract(v1, Side.V1, matches, state)
                a2, _ = abstract(v2, Side.V2, matches, state)
                unit = build_product(a1, a2, program_v1, program_v2)
                timer.switch("symbolic_execution")
                ex = explore(unit, cfg.depth_limit, deadline, clocked)
                timer.switch("program_classification")
                timer.move("symbolic_execution", "partition_classification", ex.classification_time)
                timed_out = ex.status is ExplorationStatus.DEADLINE_HIT
                if ex.records:
                    cls = aggregate_program([r.overall for r in ex.records], not timed_out)
                else:
                    cls = ProgramClass.TIMEOUT
                timer.switch("refinement")
                refined = None
                undecided = cls not in (ProgramClass.EQ, ProgramClass.NEQ)
                if undecided and sites:
                    refined = select_uif(sites, (v1, v2), clocked, ex.pending_neq_queries)
                    if ex.pending_neq_queries:
                        report.notes = [QUERY_HEURISTIC_NOTE]
                iterations.append(IterationResult(state.iteration, ex.records, cls, sites, refined,
                                                  time.perf_counter() - started, timed_out))
                explorations.append(ex)
                if not undecided or timed_out or cfg.mode is Mode.FIRST_ITERATION_ONLY:
                    break
                if state.iteration == 1:
                    if not all_sites:
                        break
                    state = state.next()
                else:
                    state = state.next(refined)
                    if len(state.excluded) >= len(all_sites):
                        break
            timer.switch("finalization")
            chosen = reported_index(iterations)
            result = iterations[chosen]
            report.iterations = iterations
            report.reported_iteration = result.iteration
            report.verdict = result.program_class
            if chosen == 0 and not result.partitions and result.timed_out:
                report.verdict = ProgramClass.TIMEOUT
            if not cfg.best_effort:
                report.verdict = _DOWNGRADE.get(report.verdict, report.verdict)
            report.witnesses = _witness_reports(v1, v2, program_v1, program_v2, explorations[chosen])
            report.solver_stats = dict(solver.stats)
    except Exception as e:
        log.debug("run failed", exc_info=True)
        report.iterations = iterations
        report.verdict = ProgramClass.ERROR
        report.reason = f"{type(e).__name__}: {e}"
    finally:
        timer.switch("finalization")
        report.total_time = timer.finish()
        report.timings = dict(timer.totals)
    return report


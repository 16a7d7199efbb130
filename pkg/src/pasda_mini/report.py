"""Run reports: the in-memory record and its JSON Lines / CSV renderings.

A JSONL report has one header object (``schema`` key), one object per
partition of the reported iteration (exactly the PartitionRecord fields),
and one footer object (``verdict`` key).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import IO, Dict, List, Mapping, Optional

from .classify import ProgramClass
from .minilang.interpreter import Effect, EffectKind

SCHEMA_VERSION = "pasda-mini/1"

PARTITION_FIELDS = (
    "index", "pc", "effect_v1", "effect_v2", "covered_v1", "covered_v2", "uif_in_pc", "uif_in_effects",
    "hard_terms_present", "reach", "output_class", "overall", "depth_limited",
)

CSV_COLUMNS = (
    "#", "path_condition", "covered_lines_v1", "covered_lines_v2", "output_v1", "output_v2",
    "reachability", "output_class", "overall_class",
)


@dataclass(frozen=True)
class WitnessReport:
    """A NEQ partition's solver model replayed through the interpreter."""

    partition: int
    inputs: Mapping[str, object]
    effect_v1: Effect
    effect_v2: Effect
    differs: bool


@dataclass
class RunReport:
    tool_version: str
    config: Dict[str, object]
    verdict: ProgramClass
    reported_iteration: Optional[int] = None
    iterations: list = field(default_factory=list)
    witnesses: List[WitnessReport] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    total_time: float = 0.0
    reason: Optional[str] = None
    notes: List[str] = field(default_factory=list)
    solver_stats: Dict[str, int] = field(default_factory=dict)

    @property
    def reported(self):
        """The IterationResult whose data is reported, if any iteration ran."""
        for it in self.iterations:
            if it.iteration == self.reported_iteration:
                return it
        return None

    @property
    def partitions(self) -> list:
        it = self.reported
        return list(it.partitions) if it is not None else []


# ---------------------------------------------------------------------------
# JSON rendering
# ---------------------------------------------------------------------------


def effect_json(e: Optional[Effect]) -> Optional[dict]:
    if e is None:
        return None
    if e.kind is EffectKind.THROWN:
        return {"kind": e.kind.value, "error": e.error}
    value = e.value if isinstance(e.value, (int, float)) else str(e.value)
    return {"kind": e.kind.value, "value": value}


def partition_json(r) -> dict:
    return {
        "index": r.index,
        "pc": str(r.pc),
        "effect_v1": effect_json(r.effect_v1),
        "effect_v2": effect_json(r.effect_v2),
        "covered_v1": list(r.covered_v1),
        "covered_v2": list(r.covered_v2),
        "uif_in_pc": r.uif_in_pc,
        "uif_in_effects": r.uif_in_effects,
        "hard_terms_present": r.hard_terms_present,
        "reach": r.reach.value,
        "output_class": r.output_class.value if r.output_class is not None else None,
        "overall": r.overall.value,
        "depth_limited": r.depth_limited,
    }


def site_json(s) -> dict:
    return {
        "id": s.id, "text": s.text, "inputs": list(s.inputs), "output": s.output,
        "occurrences": list(s.occurrences), "loop_depth": s.loop_depth, "nonlinear_count": s.nonlinear_count,
    }


def header_json(report: RunReport, run: Optional[Mapping[str, object]] = None) -> dict:
    return {"schema": SCHEMA_VERSION, "tool_version": report.tool_version, "config": report.config,
            "run": dict(run or {})}


def footer_json(report: RunReport) -> dict:
    return {
        "verdict": report.verdict.value,
        "reported_iteration": report.reported_iteration,
        "reason": report.reason,
        "iterations": [
            {
                "iteration": it.iteration,
                "program_class": it.program_class.value,
                "partitions": len(it.partitions),
                "active_uifs": [site_json(s) for s in it.active_uifs],
                "refined_uif": it.refined_uif,
                "wall_time": it.wall_time,
                "timed_out": it.timed_out,
            }
            for it in report.iterations
        ],
        "witnesses": [
            {"partition": w.partition, "inputs": dict(w.inputs), "effect_v1": effect_json(w.effect_v1),
             "effect_v2": effect_json(w.effect_v2), "differs": w.differs}
            for w in report.witnesses
        ],
        "timings": dict(report.timings),
        "total_time": report.total_time,
        "notes": list(report.notes),
        "solver_stats": dict(report.solver_stats),
    }


def report_lines(report: RunReport, run: Optional[Mapping[str, object]] = None) -> List[dict]:
    return [header_json(report, run)] + [partition_json(r) for r in report.partitions] + [footer_json(report)]


def write_jsonl(report: RunReport, out: IO[str], run: Optional[Mapping[str, object]] = None):
    for obj in report_lines(report, run):
        out.write(json.dumps(obj) + "\n")


def read_jsonl(text: str) -> List[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


# ---------------------------------------------------------------------------
# CSV rendering
# ---------------------------------------------------------------------------


def _csv_output(e: Optional[Effect]) -> str:
    return "" if e is None else str(e)


def write_csv(report: RunReport, out: IO[str]):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.partitions:
        w.writerow([
            r.index, str(r.pc), ", ".join(map(str, r.covered_v1)), ", ".join(map(str, r.covered_v2)),
            _csv_output(r.effect_v1), _csv_output(r.effect_v2), r.reach.value,
            r.output_class.value if r.output_class is not None else "", r.overall.value,
        ])


def csv_text(report: RunReport) -> str:
    buf = io.StringIO()
    write_csv(report, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Published schema
# ---------------------------------------------------------------------------

_CLASSES = ["EQ", "NEQ", "MAYBE_EQ", "MAYBE_NEQ", "UNKNOWN", "DEPTH_LIMITED"]

_EFFECT = {
    "oneOf": [
        {"type": "null"},
        {"type": "object", "required": ["kind", "value"], "additionalProperties": False,
         "properties": {"kind": {"const": "RETURN"}, "value": {"type": ["integer", "number", "string"]}}},
        {"type": "object", "required": ["kind", "error"], "additionalProperties": False,
         "properties": {"kind": {"const": "THROWN"}, "error": {"type": "string"}}},
    ]
}

_LINES = {"type": "array", "items": {"type": "integer", "minimum": 1}}

HEADER_SCHEMA = {
    "type": "object",
    "required": ["schema", "tool_version", "config", "run"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "tool_version": {"type": "string"},
        "config": {"type": "object"},
        "run": {"type": "object"},
    },
}

PARTITION_SCHEMA = {
    "type": "object",
    "required": list(PARTITION_FIELDS),
    "additionalProperties": False,
    "properties": {
        "index": {"type": "integer", "minimum": 1},
        "pc": {"type": "string"},
        "effect_v1": _EFFECT,
        "effect_v2": _EFFECT,
        "covered_v1": _LINES,
        "covered_v2": _LINES,
        "uif_in_pc": {"type": "boolean"},
        "uif_in_effects": {"type": "boolean"},
        "hard_terms_present": {"type": "boolean"},
        "reach": {"enum": ["REACHABLE", "MAYBE_REACHABLE", "UNREACHABLE"]},
        "output_class": {"enum": ["EQ", "NEQ", "MAYBE_EQ", "MAYBE_NEQ", "UNKNOWN", None]},
        "overall": {"enum": _CLASSES},
        "depth_limited": {"type": "boolean"},
    },
}

FOOTER_SCHEMA = {
    "type": "object",
    "required": ["verdict", "reported_iteration", "iterations", "witnesses", "timings", "total_time"],
    "properties": {
        "verdict": {"enum": _CLASSES + ["TIMEOUT", "ERROR"]},
        "reported_iteration": {"type": ["integer", "null"]},
        "reason": {"type": ["string", "null"]},
        "iterations": {"type": "array", "items": {
            "type": "object",
            "required": ["iteration", "program_class", "partitions", "active_uifs", "refined_uif",
                         "wall_time", "timed_out"],
        }},
        "witnesses": {"type": "array", "items": {
            "type": "object", "required": ["partition", "inputs", "effect_v1", "effect_v2", "differs"],
        }},
        "timings": {
            "type": "object",
            "required": ["initialization", "instrumentation", "symbolic_execution", "partition_classification",
                         "program_classification", "refinement", "finalization"],
            "additionalProperties": {"type": "number", "minimum": 0},
        },
        "total_time": {"type": "number", "minimum": 0},
        "notes": {"type": "array", "items": {"type": "string"}},
        "solver_stats": {"type": "object"},
    },
}


def line_schema(position: int, count: int) -> dict:
    """Schema for the line at ``position`` of a report with ``count`` lines."""
    if position == 0:
        return HEADER_SCHEMA
    if position == count - 1:
        return FOOTER_SCHEMA
    return PARTITION_SCHEMA

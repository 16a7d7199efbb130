"""Three-valued satisfiability front end.

Every query is simplified first.  Literal results are answered directly,
formulas that still mention a transcendental application are answered
``UNKNOWN``, and everything else goes to the configured backend.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from ..symbolic import BoolConst, EvalError, Formula, eval_formula, eval_poly, symbols_of
from .internal import InternalBackend
from .simplify import has_hard_terms, simplify
from .smtlib import BackendUnavailable, EncodingError, SmtProcess, default_args, encode_query, find_solver_binary

log = logging.getLogger(__name__)


class Verdict(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


class Backend(str, Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"
    EXTERNAL_THEN_INTERNAL = "external_then_internal"


@dataclass(frozen=True)
class SolverVerdict:
    """Answer to one query.  ``witness`` maps input symbols to exact values."""

    value: Verdict
    witness: Optional[Mapping[str, Fraction]] = None
    uif_values: Optional[Mapping[Tuple[str, tuple], Fraction]] = None

    def __post_init__(self):
        if self.witness is not None and self.value is not Verdict.SAT:
            raise ValueError("only SAT verdicts carry a witness")


UNKNOWN_VERDICT = SolverVerdict(Verdict.UNKNOWN)
UNSAT_VERDICT = SolverVerdict(Verdict.UNSAT)


@dataclass(frozen=True)
class SolverConfig:
    backend: Backend = Backend.INTERNAL
    timeout_ms: int = 5000
    int_lo: int = -20
    int_hi: int = 20
    real_samples: int = 64
    seed: int = 0
    solver_bin: Optional[str] = None
    solver_args: Optional[Tuple[str, ...]] = None
    query_log: Optional[str] = None

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("per-query timeout must be positive")
        if self.int_lo > self.int_hi:
            raise ValueError("internal int domain is empty")
        if self.real_samples < 0:
            raise ValueError("real sample count must be non-negative")


def resolve_backend(name: str, solver_bin: Optional[str] = None) -> Backend:
    """Map a CLI choice (``external``, ``internal``, ``auto``) to a backend."""
    if name == "auto":
        return Backend.EXTERNAL_THEN_INTERNAL if find_solver_binary(solver_bin) else Backend.INTERNAL
    return Backend(name)


def _validated(f: Formula, env: Dict[str, Fraction], table) -> bool:
    try:
        return eval_formula(f, env, table)
    except EvalError:
        return False


class Solver:
    """A solver handle.  Owns at most one external process; not thread-safe."""

    def __init__(self, cfg: SolverConfig = SolverConfig()):
        self.cfg = cfg
        self.internal = InternalBackend(cfg.int_lo, cfg.int_hi, cfg.real_samples, cfg.seed)
        self._external: Optional[SmtProcess] = None
        self._cache: Dict[Formula, SolverVerdict] = {}
        self.stats: Counter = Counter()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._external is not None:
            self._external.close()
            self._external = None

    def external(self) -> SmtProcess:
        if self._external is None:
            binary = find_solver_binary(self.cfg.solver_bin)
            if binary is None:
                raise BackendUnavailable("no external solver binary configured or found on PATH")
            args = self.cfg.solver_args if self.cfg.solver_args is not None else default_args(self.cfg.timeout_ms)
            self._external = SmtProcess(binary, args, self.cfg.timeout_ms, self.cfg.query_log)
        return self._external

    def check(self, f: Formula, deadline: Optional[float] = None) -> SolverVerdict:
        """Decide ``f``.  ``deadline`` is a ``time.monotonic()`` instant bounding the query."""
        self.stats["queries"] += 1
        g = simplify(f)
        if isinstance(g, BoolConst):
            self.stats["decided_by_simplification"] += 1
            if not g.value:
                return UNSAT_VERDICT
            return SolverVerdict(Verdict.SAT, {name: Fraction(0) for name in symbols_of(f)}, {})
        if has_hard_terms(g):
            self.stats["hard_terms"] += 1
            return UNKNOWN_VERDICT
        if g in self._cache:
            self.stats["cache_hits"] += 1
            return self._cache[g]
        verdict = self._dispatch(g, deadline)
        if verdict.witness is not None:
            env = {name: Fraction(0) for name in symbols_of(f)}
            env.update(verdict.witness)
            table = dict(verdict.uif_values or {})
            if _validated(g, env, table):
                verdict = SolverVerdict(Verdict.SAT, env, table)
            else:
                verdict = SolverVerdict(Verdict.SAT)
        self._cache[g] = verdict
        return verdict

    def _dispatch(self, g: Formula, deadline: Optional[float]) -> SolverVerdict:
        backend = self.cfg.backend
        if backend is Backend.INTERNAL:
            return self._internal(g)
        try:
            verdict = self._external_check(g, deadline)
        except (BackendUnavailable, EncodingError) as e:
            if backend is Backend.EXTERNAL and isinstance(e, BackendUnavailable):
                raise
            log.debug("external backend not used: %s", e)
            verdict = UNKNOWN_VERDICT
        if verdict.value is Verdict.UNKNOWN and backend is Backend.EXTERNAL_THEN_INTERNAL:
            return self._internal(g)
        return verdict

    def _internal(self, g: Formula) -> SolverVerdict:
        self.stats["internal"] += 1
        status, env, table = self.internal.check(g)
        if status == "sat":
            return SolverVerdict(Verdict.SAT, env, dict(table))
        if status == "unsat":
            return UNSAT_VERDICT
        return UNKNOWN_VERDICT

    def _external_check(self, g: Formula, deadline: Optional[float]) -> SolverVerdict:
        self.stats["external"] += 1
        timeout_ms = self.cfg.timeout_ms
        if deadline is not None:
            timeout_ms = max(1, min(timeout_ms, int((deadline - time.monotonic()) * 1000)))
        script, apps, terms = encode_query(g)
        answer, model, values = self.external().query(script, terms, timeout_ms)
        if answer == "unsat":
            return UNSAT_VERDICT
        if answer != "sat":
            return UNKNOWN_VERDICT
        symbols = symbols_of(g)
        env = {}
        for name in symbols:
            v = model.get(name, Fraction(0))
            if v is None:
                return SolverVerdict(Verdict.SAT)
            env[name] = v
        if any(v is None for v in values):
            return SolverVerdict(Verdict.SAT)
        table = {}
        pending = list(zip(apps, values))
        # nested applications: resolve inner ones first
        while pending:
            rest = []
            for app, value in pending:
                try:
                    args = tuple(eval_poly(a, env, table) for a in app.args)
                except EvalError:
                    rest.append((app, value))
                    continue
                table[(app.name, args)] = value
            if len(rest) == len(pending):
                return SolverVerdict(Verdict.SAT)
            pending = rest
        return SolverVerdict(Verdict.SAT, env, table)


def check_sat(f: Formula, cfg: SolverConfig = SolverConfig()) -> SolverVerdict:
    """One-shot query with a fresh handle."""
    with Solver(cfg) as s:
        return s.check(f)

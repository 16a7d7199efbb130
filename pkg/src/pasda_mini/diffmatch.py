"""Syntactic matching of unchanged statements and UIF abstraction.

Statements are compared by their normalized printed text.  Matching is a
greedy in-order alignment of each block; a compound statement pairs with
another only when its header text is identical, and only then are the two
bodies aligned.  To make the result independent of argument order, the
pair is always aligned in a canonical orientation and mirrored back.

Every matched assignment defines a UIF site.  Abstraction rewrites
``x = e`` (or ``x op= e``, or ``let x = e``) into ``x = uif_k(reads...)``.
All assignments with the same text and typing share the site, including
unmatched ones, so a statement duplicated on one side shows up as an
occurrence-count difference.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from .minilang import ast as A
from .minilang.printer import function_str, header_str, stmt_str

StmtId = Tuple[object, ...]


class Side(str, Enum):
    V1 = "v1"
    V2 = "v2"


@dataclass(frozen=True)
class MatchSet:
    """Matched statement pairs of one function pair, keyed by block path."""

    v1: A.FunctionDef
    v2: A.FunctionDef
    pairs: Tuple[Tuple[StmtId, StmtId], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def mirrored(self) -> "MatchSet":
        return MatchSet(self.v2, self.v1, tuple((b, a) for a, b in self.pairs))


@dataclass(frozen=True)
class UifSite:
    id: str
    text: str
    replaced: Tuple[Tuple[StmtId, StmtId], ...]
    inputs: Tuple[str, ...]
    input_types: Tuple[str, ...]
    output: str
    ty: str
    occurrences: Tuple[int, int]
    loop_depth: int
    nonlinear_count: int

    @property
    def rank(self) -> Tuple[int, int]:
        return (self.loop_depth, self.nonlinear_count)


@dataclass(frozen=True)
class RefinementState:
    excluded: FrozenSet[str] = frozenset()
    iteration: int = 1

    def __post_init__(self):
        if self.iteration < 1:
            raise ValueError("iterations are numbered from 1")

    def next(self, refined: Optional[str] = None) -> "RefinementState":
        excluded = self.excluded | {refined} if refined else self.excluded
        return RefinementState(frozenset(excluded), self.iteration + 1)


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


def _key(s: A.Stmt) -> str:
    return header_str(s) if isinstance(s, (A.If, A.While, A.For)) else stmt_str(s)


def _blocks(s: A.Stmt) -> Tuple[Tuple[str, Tuple[A.Stmt, ...]], ...]:
    if isinstance(s, A.If):
        return (("then", s.then), ("else", s.other))
    if isinstance(s, (A.While, A.For)):
        return (("body", s.body),)
    return ()


def _align(b1, p1: StmtId, b2, p2: StmtId, out: List[Tuple[StmtId, StmtId]]):
    pos = 0
    for i, s1 in enumerate(b1):
        k = _key(s1)
        for j in range(pos, len(b2)):
            s2 = b2[j]
            if type(s1) is type(s2) and _key(s2) == k:
                pos = j + 1
                if stmt_str(s1) == stmt_str(s2):
                    out.append((p1 + (i,), p2 + (j,)))
                for (tag, c1), (_, c2) in zip(_blocks(s1), _blocks(s2)):
                    _align(c1, p1 + (i, tag), c2, p2 + (j, tag), out)
                break


def match_unchanged(v1: A.FunctionDef, v2: A.FunctionDef) -> MatchSet:
    """Greedy in-order matching of statements with identical normalized text."""
    if function_str(v1) > function_str(v2):
        return match_unchanged(v2, v1).mirrored()
    pairs: List[Tuple[StmtId, StmtId]] = []
    _align(v1.body, (), v2.body, (), pairs)
    return MatchSet(v1, v2, tuple(sorted(pairs)))


def statement_at(fn: A.FunctionDef, sid: StmtId) -> A.Stmt:
    block = fn.body
    stmt = None
    path = list(sid)
    while path:
        stmt = block[path.pop(0)]
        if path:
            tag = path.pop(0)
            block = dict(_blocks(stmt))[tag]
    return stmt


def iter_stmts(block, prefix: StmtId = (), loop_depth: int = 0) -> Iterator[Tuple[StmtId, A.Stmt, int]]:
    """Pre-order walk over block statements with ids and loop nesting depth."""
    for i, s in enumerate(block):
        sid = prefix + (i,)
        yield sid, s, loop_depth
        inner = loop_depth + (1 if isinstance(s, (A.While, A.For)) else 0)
        for tag, child in _blocks(s):
            yield from iter_stmts(child, sid + (tag,), inner)


# ---------------------------------------------------------------------------
# Sites
# ---------------------------------------------------------------------------


def _reads(e: A.Expr, out: List[Tuple[str, str]]):
    for node in A.walk_expr(e):
        if isinstance(node, A.Var) and all(node.name != n for n, _ in out):
            out.append((node.name, node.ty))


def _is_const(e: A.Expr) -> bool:
    return isinstance(e, (A.IntLit, A.RealLit))


def nonlinear_ops(e: A.Expr) -> int:
    n = 0
    for node in A.walk_expr(e):
        if isinstance(node, A.Binary) and node.op in ("*", "/", "%"):
            if not (_is_const(node.left) or _is_const(node.right)):
                n += 1
        elif isinstance(node, A.Call) and node.intrinsic:
            n += 1
    return n


def _may_fail(e: A.Expr) -> bool:
    for node in A.walk_expr(e):
        if isinstance(node, A.Binary) and node.op in ("/", "%"):
            if not (_is_const(node.right) and node.right.value != 0):
                return True
        if isinstance(node, A.Call) and not node.intrinsic:
            return True
    return False


@dataclass(frozen=True)
class _Shape:
    inputs: Tuple[Tuple[str, str], ...]
    output: str
    ty: str
    nonlinear: int


def _shape(s: A.Stmt) -> Optional[_Shape]:
    """Inputs/outputs of an abstractable assignment, or None if it is not one."""
    if not isinstance(s, (A.Let, A.Assign)) or isinstance(s.value, A.UifApp):
        return None
    if _may_fail(s.value):
        # a UIF never throws, so statements that can raise stay concrete
        return None
    reads: List[Tuple[str, str]] = []
    nonlinear = nonlinear_ops(s.value)
    if isinstance(s, A.Assign) and s.op != "=":
        reads.append((s.name, s.ty))
        if s.op in ("/=", "%="):
            return None
        if s.op == "*=" and not _is_const(s.value):
            nonlinear += 1
    _reads(s.value, reads)
    return _Shape(tuple(reads), s.name, s.ty, nonlinear)


def _site_key(s: A.Stmt, shape: _Shape) -> Tuple[str, Tuple[Tuple[str, str], ...], str]:
    return (stmt_str(s), shape.inputs, shape.ty)


def find_sites(matches: MatchSet) -> List[UifSite]:
    """UIF sites of a matched pair, numbered in v1 pre-order."""
    matched = dict(matches.pairs)
    v1_stmts = list(iter_stmts(matches.v1.body))
    v2_stmts = list(iter_stmts(matches.v2.body))
    order: List[tuple] = []
    info: Dict[tuple, dict] = {}
    for sid, s, _ in v1_stmts:
        if sid not in matched:
            continue
        shape = _shape(s)
        if shape is None:
            continue
        key = _site_key(s, shape)
        if key not in info:
            order.append(key)
            info[key] = {"shape": shape, "pairs": []}
        info[key]["pairs"].append((sid, matched[sid]))
    counts = {key: [0, 0] for key in info}
    depth = {key: 0 for key in info}
    for idx, stmts in ((0, v1_stmts), (1, v2_stmts)):
        for _, s, d in stmts:
            shape = _shape(s)
            if shape is None:
                continue
            key = _site_key(s, shape)
            if key in counts:
                counts[key][idx] += 1
                depth[key] = max(depth[key], d)
    sites = []
    for n, key in enumerate(order, 1):
        shape = info[key]["shape"]
        sites.append(UifSite(
            id=f"uif_{n}",
            text=key[0],
            replaced=tuple(info[key]["pairs"]),
            inputs=tuple(name for name, _ in shape.inputs),
            input_types=tuple(ty for _, ty in shape.inputs),
            output=shape.output,
            ty=shape.ty,
            occurrences=(counts[key][0], counts[key][1]),
            loop_depth=depth[key],
            nonlinear_count=shape.nonlinear,
        ))
    return sites


# ---------------------------------------------------------------------------
# Abstraction
# ---------------------------------------------------------------------------


def _rewrite_block(block, table: Dict[tuple, UifSite]) -> Tuple[A.Stmt, ...]:
    return tuple(_rewrite(s, table) for s in block)


def _rewrite(s: A.Stmt, table: Dict[tuple, UifSite]) -> A.Stmt:
    if isinstance(s, A.If):
        return replace(s, then=_rewrite_block(s.then, table), other=_rewrite_block(s.other, table))
    if isinstance(s, (A.While, A.For)):
        return replace(s, body=_rewrite_block(s.body, table))
    shape = _shape(s)
    if shape is None:
        return s
    site = table.get(_site_key(s, shape))
    if site is None:
        return s
    args = tuple(A.Var(name, ty, line=s.line) for name, ty in shape.inputs)
    app = A.UifApp(site.id, args, site.ty, line=s.line)
    if isinstance(s, A.Let):
        return replace(s, value=app)
    return replace(s, op="=", value=app)


def abstract(fn: A.FunctionDef, side: Side, matches: MatchSet, state: RefinementState
             ) -> Tuple[A.FunctionDef, List[UifSite]]:
    """Replace every active site's statements in ``fn`` by UIF applications.

    ``side`` names which function of the matched pair ``fn`` is; the site
    table is shared so both sides get the same UIF names.
    """
    if state.iteration == 1:
        return fn, []
    if Side(side) not in (Side.V1, Side.V2):
        raise ValueError(side)
    sites = [s for s in find_sites(matches) if s.id not in state.excluded]
    table = {(s.text, tuple(zip(s.inputs, s.input_types)), s.ty): s for s in sites}
    return replace(fn, body=_rewrite_block(fn.body, table)), sites

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pasda_mini.diffmatch import (
    MatchSet, RefinementState, Side, abstract, find_sites, iter_stmts, match_unchanged, statement_at,
)
from pasda_mini.minilang import parse
from pasda_mini.minilang import ast as A
from pasda_mini.minilang.printer import function_str, stmt_str
from pasda_mini.product import SignatureMismatch, build_product
from progen import make_pair

PAIR = parse("""
fn f(x: int, y: real) -> real {
  let a = tan(y) * y;
  let b = x + 1;
  for (let i = 0; i < 3; i++) { b += i * x; }
  b = b + 1;
  return a + b;
}
fn g(x: int, y: real) -> real {
  let a = tan(y) * y;
  let b = x + 1;
  b = b + 1;
  for (let i = 0; i < 3; i++) { b += i * x; }
  b = b + 1;
  return a - b;
}
""")


def test_matching_pairs_identical_statements_in_order():
    m = match_unchanged(PAIR["f"], PAIR["g"])
    texts = [(stmt_str(statement_at(m.v1, a)), stmt_str(statement_at(m.v2, b))) for a, b in m.pairs]
    assert all(t1 == t2 for t1, t2 in texts)
    assert ("let a = tan(y) * y;", "let a = tan(y) * y;") in texts
    assert not any("return" in t for t, _ in texts)


def test_sites_record_occurrences_depth_and_nonlinearity():
    sites = find_sites(match_unchanged(PAIR["f"], PAIR["g"]))
    by_text = {s.text: s for s in sites}
    assert [s.id for s in sites] == [f"uif_{i}" for i in range(1, len(sites) + 1)]
    a = by_text["let a = tan(y) * y;"]
    assert a.inputs == ("y",) and a.output == "a" and a.nonlinear_count == 2 and a.loop_depth == 0
    inc = by_text["b = b + 1;"]
    assert inc.occurrences == (1, 2)
    loop_body = by_text["b += i * x;"]
    assert loop_body.loop_depth == 1 and loop_body.inputs == ("b", "i", "x")


def test_first_iteration_is_not_abstracted():
    m = match_unchanged(PAIR["f"], PAIR["g"])
    fn, sites = abstract(PAIR["f"], Side.V1, m, RefinementState())
    assert fn is PAIR["f"] and sites == []


def test_abstraction_replaces_active_sites_and_skips_refined():
    m = match_unchanged(PAIR["f"], PAIR["g"])
    state = RefinementState().next()
    f2, sites = abstract(PAIR["f"], Side.V1, m, state)
    g2, _ = abstract(PAIR["g"], Side.V2, m, state)
    apps = [s for _, s, _ in iter_stmts(g2.body) if isinstance(s, (A.Let, A.Assign)) and isinstance(s.value, A.UifApp)]
    assert len(apps) == 5  # let a, let b, both b = b + 1, loop body
    refined = state.next(sites[0].id)
    f3, sites3 = abstract(PAIR["f"], Side.V1, m, refined)
    assert sites[0].id not in {s.id for s in sites3}
    assert "tan" in function_str(f3)


def test_statements_that_may_fail_are_not_abstracted():
    prog = parse("""
fn f(x: int, d: int) -> int { let q = x / d; let h = x / 2; return q + h; }
fn g(x: int, d: int) -> int { let q = x / d; let h = x / 2; return q - h; }
""")
    texts = [s.text for s in find_sites(match_unchanged(prog["f"], prog["g"]))]
    assert texts == ["let h = x / 2;"]


def test_refinement_state_counts_iterations():
    s = RefinementState().next().next("uif_1").next("uif_2")
    assert s.iteration == 4 and s.excluded == {"uif_1", "uif_2"}
    with pytest.raises(ValueError):
        RefinementState(iteration=0)


def _pairs(seed):
    p = make_pair(seed)
    return parse(p.old)["f"], parse(p.new)["f"]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_matching_is_symmetric(seed):
    a, b = _pairs(seed)
    assert match_unchanged(b, a) == match_unchanged(a, b).mirrored()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_abstraction_is_idempotent(seed):
    a, b = _pairs(seed)
    m = match_unchanged(a, b)
    state = RefinementState().next()
    once, _ = abstract(a, Side.V1, m, state)
    twice, _ = abstract(once, Side.V1, MatchSet(once, m.v2, m.pairs), state)
    assert function_str(twice) == function_str(once)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_self_match_covers_every_simple_statement(seed):
    a, _ = _pairs(seed)
    m = match_unchanged(a, a)
    simple = [sid for sid, s, _ in iter_stmts(a.body) if not isinstance(s, (A.If, A.While, A.For))]
    matched = {p for p, _ in m.pairs}
    assert set(simple) <= matched


@pytest.mark.parametrize("src", [
    "fn f(x: int) -> int { return x; } fn g(x: int, y: int) -> int { return x; }",
    "fn f(x: int) -> int { return x; } fn g(x: real) -> int { return 1; }",
    "fn f(x: int) -> int { return x; } fn g(x: int) -> real { return 1.0; }",
])
def test_product_rejects_signature_mismatch(src):
    prog = parse(src)
    with pytest.raises(SignatureMismatch):
        build_product(prog["f"], prog["g"])


def test_product_shares_v1_parameter_names():
    prog = parse("fn f(a: int) -> int { return a; } fn g(b: int) -> int { return b; }")
    unit = build_product(prog["f"], prog["g"])
    assert [p.name for p in unit.shared_params] == ["a"]

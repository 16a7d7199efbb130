import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pasda_mini.minilang import (
    DIV_BY_ZERO, CallCycleError, EffectKind, FuelExhausted, ParseError, TypeCheckError, interpret, parse,
    pretty_print, run_with_coverage,
)
from pasda_mini.minilang.interpreter import trunc_div, trunc_mod, wrap64
from progen import make_pair


def run(src, *inputs, fn="f"):
    prog = parse(src)
    return interpret(prog[fn], inputs, prog)


@pytest.mark.parametrize("a, b, q, r", [(7, 2, 3, 1), (-7, 2, -3, -1), (7, -2, -3, 1), (-7, -2, 3, -1), (0, 5, 0, 0)])
def test_truncating_division(a, b, q, r):
    assert trunc_div(a, b) == q
    assert trunc_mod(a, b) == r
    assert run("fn f(a: int, b: int) -> int { return a / b; }", a, b).value == q
    assert run("fn f(a: int, b: int) -> int { return a % b; }", a, b).value == r


def test_division_by_zero_is_thrown_effect():
    e = run("fn f(a: int, b: int) -> int { return a / b; }", 1, 0)
    assert e.kind is EffectKind.THROWN and e.error == DIV_BY_ZERO
    e = run("fn f(a: real) -> real { return a / 0.0; }", 1.0)
    assert e.error == DIV_BY_ZERO


def test_fail_statement_names_error():
    e = run("fn f(x: int) -> int { if (x > 3) { fail TooBig; } return x; }", 5)
    assert e.kind is EffectKind.THROWN and e.error == "TooBig"
    assert run("fn f(x: int) -> int { if (x > 3) { fail TooBig; } return x; }", 2).value == 2


def test_int_arithmetic_wraps_at_64_bits():
    assert wrap64(2**63) == -(2**63)
    assert run("fn f(x: int) -> int { return x * 2; }", 2**62).value == -(2**63)


def test_int_promotes_to_real():
    e = run("fn f(x: int, y: real) -> real { return x + y; }", 1, 0.5)
    assert e.value == 1.5 and isinstance(e.value, float)


def test_intrinsics():
    src = "fn f(x: real) -> real { return sqrt(x) + abs(0.0 - x) + max(x, 2.0) + pow(x, 2.0); }"
    assert run(src, 4.0).value == pytest.approx(2 + 4 + 4 + 16)
    assert math.isnan(run("fn f(x: real) -> real { return sqrt(x); }", -1.0).value)


def test_user_calls_and_coverage():
    src = """fn sq(a: int) -> int {
  return a * a;
}
fn f(x: int) -> int {
  if (x > 0) {
    return sq(x);
  }
  return 0;
}"""
    prog = parse(src)
    effect, lines = run_with_coverage(prog["f"], [3], prog)
    assert effect.value == 9
    assert lines == (2, 5, 6)


def test_fuel_exhaustion():
    with pytest.raises(FuelExhausted):
        run("fn f(x: int) -> int { while (true) { x += 1; } return x; }", 0)


@pytest.mark.parametrize("src, error", [
    ("fn f(x: int) -> int { return x + ; }", ParseError),
    ("fn f(x: int) -> int { return y; }", (ParseError, TypeCheckError)),
    ("fn f(x: int) -> int { let a = 1.5; return a; }", TypeCheckError),
    ("fn f(x: int) -> int { if (x) { return 1; } return 0; }", TypeCheckError),
    ("fn f(x: int) -> int { x = 1; }", TypeCheckError),
    ("fn f(x: int) -> int { return g(x); } fn g(x: int) -> int { return f(x); }", CallCycleError),
])
def test_rejects_invalid_programs(src, error):
    with pytest.raises(error):
        parse(src)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse("fn f(x: int) -> int {\n  return x +;\n}")
    assert info.value.line == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_pretty_print_round_trip(seed):
    for src in (make_pair(seed).old, make_pair(seed).new):
        prog = parse(src)
        printed = pretty_print(prog)
        assert pretty_print(parse(printed)) == printed

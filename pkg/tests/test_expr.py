import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loja.errors import ArityError, DomainError, EvaluationError, ParseError
from loja.expr import (
    And, BinOp, Branch, Call, Cmp, Const, Neg, Or, PiecewiseFn, Pow, Var,
    evaluate, evaluate_many, lint, parse, parse_guard, to_source, variables,
)

EX38_G = "piecewise{ x1 < 1 : 1/(1-x1) ; x1 == 1 : 1 }"
EX39_G = "piecewise{ x1 == 0 : 1 ; x1 > 0 : 0 }"
EX49_F = "(x1 - floor(x1))^floor(x1)"
EX49_G = "x1 - floor(x1)"


def test_fractional_part_parses():
    fn = parse(EX49_G)
    assert fn.arity == 1 and fn.is_plain
    assert fn.branches[0].body == BinOp("-", Var(1), Call("floor", (Var(1),)))


def test_constant_zero():
    fn = parse("0")
    assert fn.arity == 1
    assert evaluate(fn, 3.7) == 0.0
    assert parse("0", arity=3).arity == 3


def test_ex3_8_g_shape():
    fn = parse(EX38_G)
    assert len(fn.branches) == 2
    assert fn.branches[0].guard == Cmp("<", Var(1), Const(1.0))
    assert evaluate(fn, 0.5) == pytest.approx(2.0)
    assert evaluate(fn, 1.0) == 1.0


@pytest.mark.parametrize("src, x, want", [
    (EX49_G, 2.25, 0.25),
    (EX49_F, 3.5, 0.125),
    (EX39_G, 0.0, 1.0),
    (EX39_G, 0.3, 0.0),
    ("floor(-0.5)", 0.0, -1.0),
    ("min(x1, 2, -x1)", 1.5, -1.5),
    ("max(x1, 2) + sign(-3) * abs(-x1)", 1.0, 1.0),
    ("sqrt(x1)^3", 4.0, 8.0),
    ("(2^3)^2", 0.0, 64.0),
    ("-x1^2", 3.0, -9.0),
])
def test_evaluation_examples(src, x, want):
    assert evaluate(parse(src), x) == pytest.approx(want, rel=0, abs=1e-15)


def test_first_branch_wins():
    fn = parse("piecewise{ x1 >= 0 : 1 ; x1 >= -1 : 2 ; x1 > -5 : 3 }")
    assert evaluate_many(fn, [0.5, -0.5, -2.0]).tolist() == [1.0, 2.0, 3.0]
    swapped = parse("piecewise{ x1 >= -1 : 2 ; x1 >= 0 : 1 }")
    assert evaluate(swapped, 0.5) == 2.0


def test_domain_error_not_default():
    fn = parse(EX38_G)
    with pytest.raises(DomainError):
        evaluate(fn, 1.5)
    out = evaluate_many(fn, [0.0, 1.5], strict=False)
    assert out[0] == 1.0 and math.isnan(out[1])


@pytest.mark.parametrize("src, x", [("sqrt(x1)", -1.0), ("1/x1", 0.0), ("x1^(x1 - 3)", 1.0)])
def test_evaluation_errors(src, x):
    with pytest.raises(EvaluationError):
        evaluate(parse(src), x)


def test_lenient_errors_become_nan():
    out = evaluate_many(parse("sqrt(x1)"), [4.0, -1.0, 9.0], on_error="nan")
    assert out[0] == 2.0 and math.isnan(out[1]) and out[2] == 3.0


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse("x1 +\n  * 2")
    assert (err.value.line, err.value.column) == (2, 3)
    assert "line 2, column 3" in str(err.value)


@pytest.mark.parametrize("src", ["x1^-2", "x1^1.5", "2^3^2", "foo(x1)", "sqrt(x1, x2)", "(x1", "x1 x2",
                                 "piecewise{ x1 : 1 }", "piecewise{ }"])
def test_syntax_errors(src):
    with pytest.raises(ParseError):
        parse(src)


def test_arity_errors():
    with pytest.raises(ArityError):
        parse("x1 + x3", arity=2)
    with pytest.raises(ArityError):
        parse("x0")
    with pytest.raises(ArityError):
        evaluate_many(parse("x1 + x2"), np.zeros((3, 3)))


def test_guard_connectives():
    g = parse_guard("x1 > 0 && x1 < 1 || x1 == 5")
    assert isinstance(g, Or) and isinstance(g.parts[0], And)
    fn = PiecewiseFn(1, (Branch(g, Const(1.0)), Branch(None, Const(0.0))))
    assert evaluate_many(fn, [0.5, 2.0, 5.0]).tolist() == [1.0, 0.0, 1.0]


def test_lint_reports_overlap():
    fn = parse("piecewise{ x1 >= 0 : 1 ; x1 <= 0 : 2 }")
    warnings = lint(fn, np.linspace(-1, 1, 5))
    assert len(warnings) == 1 and "overlap" in warnings[0]
    assert lint(parse(EX38_G), np.linspace(0, 1, 11)) == []


def test_variables_and_arity_inference():
    fn = parse("piecewise{ x3 > 0 : x1 ; x3 <= 0 : x2 }")
    assert fn.arity == 3 and variables(fn) == {1, 2, 3}
    assert evaluate(fn, [1.0, 2.0, -1.0]) == 2.0


def test_vectorised_matches_pointwise():
    fn = parse(EX49_F)
    xs = np.linspace(0, 6, 97)
    vec = evaluate_many(fn, xs)
    assert np.array_equal(vec, [evaluate(fn, x) for x in xs])


def test_fixed_sources_round_trip():
    for src in (EX38_G, EX39_G, EX49_F, EX49_G, "-(x1 - -2)", "x1^floor(x1)", "(x1^2)^3",
                "piecewise{ x1 > -1 && x1 <= 1 || x1 == 3 : x1^2 + 1 }"):
        fn = parse(src)
        assert parse(to_source(fn)) == fn
        assert str(fn) == to_source(fn)


# ---------------------------------------------------------------------------
# round trip on random trees

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
leaves = st.one_of(finite.map(Const), st.integers(1, 4).map(Var))


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(children, st.integers(0, 5)).map(lambda t: Pow(*t)),
        children.filter(lambda c: not isinstance(c, Const)).map(Neg),
        st.tuples(st.sampled_from(["sqrt", "abs", "floor", "sign"]), children)
        .map(lambda t: Call(t[0], (t[1],))),
        st.tuples(st.sampled_from(["min", "max"]), st.lists(children, min_size=1, max_size=3))
        .map(lambda t: Call(t[0], tuple(t[1]))),
        st.tuples(children, children).map(lambda t: Pow(t[0], Call("floor", (t[1],)))),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)
cmps = st.tuples(st.sampled_from(["<", "<=", "==", ">=", ">"]), exprs, exprs).map(lambda t: Cmp(*t))
guards = st.one_of(
    cmps,
    st.lists(cmps, min_size=2, max_size=3).map(lambda p: And(tuple(p))),
    st.lists(st.one_of(cmps, st.lists(cmps, min_size=2, max_size=2).map(lambda p: And(tuple(p)))),
             min_size=2, max_size=3).map(lambda p: Or(tuple(p))),
)


@given(exprs)
def test_round_trip_plain(e):
    fn = PiecewiseFn(4, (Branch(None, e),))
    assert parse(to_source(fn), arity=4) == fn


@given(st.lists(st.tuples(guards, exprs), min_size=1, max_size=3))
def test_round_trip_piecewise(branches):
    fn = PiecewiseFn(4, tuple(Branch(g, b) for g, b in branches))
    assert parse(to_source(fn), arity=4) == fn


@given(st.floats(-50, 50))
def test_fractional_part_in_unit_interval(x):
    # x - floor(x) rounds up to 1.0 for tiny negative x
    v = evaluate(parse(EX49_G), x)
    assert 0.0 <= v <= 1.0
    assert v == x - math.floor(x)


def test_negative_zero_round_trip():
    fn = PiecewiseFn(1, (Branch(None, Pow(Const(-0.0), 2)),))
    assert to_source(fn) == "(-0.0)^2"
    assert parse(to_source(fn)) == fn

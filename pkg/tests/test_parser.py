from fractions import Fraction

import pytest
from hypothesis import given, settings

from fold2d.expr import (
    ArityError,
    ExprSyntaxError,
    UnknownIdentifier,
    check_symbols,
    const,
    cos,
    exp,
    param,
    parse_expr,
    sin,
    to_text,
    var,
)
from fold2d.expr.nodes import ADD, MUL, NEG, POW

from helpers import DES1_F, PARAMS, VARS, any_exprs


def p(text):
    return parse_expr(text, VARS, PARAMS)


def test_des1_f_structure():
    x, y, t = var("x"), var("y"), var("t")
    a, b, c = param("a"), param("b"), param("c")
    expected = x ** 2 + exp(a * sin(b * t)) * y + c
    assert p(DES1_F) == expected


def test_zero_literal():
    e = parse_expr("0")
    assert e.kind == "const" and e.value == 0


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("x + + y", VARS)
    assert info.value.position == 4
    assert "offset 4" in str(info.value)


@pytest.mark.parametrize("text", ["", "x +", "(x", "x)", "2 3", "x ^", "x $ y", "1e"])
def test_malformed(text):
    with pytest.raises(ExprSyntaxError):
        parse_expr(text, VARS)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        parse_expr("x + z", VARS)
    with pytest.raises(UnknownIdentifier):
        parse_expr("u", VARS)


def test_arity():
    with pytest.raises(ArityError):
        parse_expr("sin(x, y)", VARS)
    with pytest.raises(ArityError):
        parse_expr("exp()", VARS)


@pytest.mark.parametrize("text", ["sin + 1", "sin x"])
def test_bare_function_name(text):
    with pytest.raises(ArityError):
        parse_expr(text, VARS)


def test_precedence():
    assert p("x + y*t").kind == ADD
    assert p("x - y - t") == (var("x") - var("y")) - var("t")
    assert p("x / y / t") == (var("x") / var("y")) / var("t")
    # right associative power
    assert p("x^y^t") == var("x") ** (var("y") ** var("t"))
    # unary minus binds looser than ^
    assert p("-x^2") == -(var("x") ** 2)
    assert p("x^-2").kind == POW and p("x^-2").args[1].kind == NEG
    assert p("2*-x").kind == MUL


def test_numbers_exact():
    assert p("0.1").value == Fraction(1, 10)
    assert p("2.5e-3").value == Fraction(1, 400)
    assert p("1E2").value == 100


def test_variables_and_parameters_distinct():
    e = p("a*x")
    assert e.args[0].kind == "param" and e.args[1].kind == "var"
    assert parse_expr("u*w", ("t", "u", "w")).args[0].kind == "var"


def test_check_symbols():
    check_symbols(p("a*x + t"), VARS, PARAMS)
    with pytest.raises(ValueError):
        check_symbols(p("a*x"), ("t", "u", "w"), PARAMS)


@pytest.mark.parametrize(
    "text",
    [
        "x^2 + exp(a*sin(b*t))*y + c",
        "-2*exp(-a*sin(b*t))*x^3 - 2*x*y - a*b*y*cos(b*t)",
        "(x + y)^2",
        "x - (y - t)",
        "x/(y*t)",
        "-(x + y)",
        "(-x)^2",
        "x^(y^t)",
        "(x^y)^t",
        "2^-x",
        "sqrt(ln(x))/3",
        "0.125*x",
    ],
)
def test_print_parse_fixed(text):
    e = p(text)
    assert p(to_text(e)) == e


def test_constants_print():
    assert to_text(const(Fraction(1, 3))) == "1/3"
    assert to_text(const(-2)) == "-2"
    assert to_text(const(0.5)) == "0.5"
    assert to_text(cos(var("t"))) == "cos(t)"


@settings(max_examples=400, deadline=None)
@given(any_exprs())
def test_print_parse_round_trip(e):
    assert p(to_text(e)) == e

import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipopt import parse_expression
from lipopt.benchfns import f1
from lipopt.errors import ExpressionSyntaxError, NonFiniteValue, UnknownIdentifier


def ev(text, x=0.0):
    return parse_expression(text).evaluate(x)


def test_examples():
    assert ev("x*sin(x)", 2.0) == pytest.approx(1.8185948536513634, abs=1e-15)
    assert ev("-x^2", 3.0) == -9.0
    with pytest.raises(ExpressionSyntaxError) as ei:
        parse_expression("2x")
    assert ei.value.offset == 1


@pytest.mark.parametrize("text,x,expected", [
    ("2^3^2", 0, 512.0),
    ("(2^3)^2", 0, 64.0),
    ("2^-1", 0, 0.5),
    ("1-2-3", 0, -4.0),
    ("8/4/2", 0, 1.0),
    ("-2*3", 0, -6.0),
    ("-(-x)", 4, 4.0),
    ("pi", 0, math.pi),
    ("e", 0, math.e),
    ("sqrt(abs(x))", -9, 3.0),
    ("exp(log(x))", 2, 2.0),
    ("1.5e2 + .5", 0, 150.5),
    ("  x *  ( 1 + x )", 2, 6.0),
    ("cos(0)+tan(0)", 0, 1.0),
])
def test_grammar(text, x, expected):
    assert ev(text, x) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text,offset", [
    ("", 0), ("--x", 1), ("x +", 3), ("(x", 2), ("x)", 1), ("sin x", 4), ("x $ 1", 2),
    ("x ** 2", 3), ("é+x", 0), ("x+é", 2),
])
def test_syntax_error_offsets(text, offset):
    with pytest.raises(ExpressionSyntaxError) as ei:
        parse_expression(text)
    assert ei.value.offset == offset
    assert ei.value.offset <= len(text.encode())


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as ei:
        parse_expression("x + foo(x)")
    assert ei.value.offset == 4 and "sin" in ei.value.expected


def test_domain_errors_at_eval_time():
    ast = parse_expression("log(x)")
    with pytest.raises(NonFiniteValue):
        ast(-1.0)
    with pytest.raises(NonFiniteValue):
        parse_expression("sqrt(x)")(-4.0)
    with pytest.raises(NonFiniteValue):
        parse_expression("1/x")(0.0)


def test_bytes_input():
    assert parse_expression(b"x+1")(1.0) == 2.0
    with pytest.raises(ExpressionSyntaxError) as ei:
        parse_expression(b"x+\xff")
    assert ei.value.offset == 2


def test_deep_nesting_is_an_error_not_a_crash():
    with pytest.raises(ExpressionSyntaxError):
        parse_expression("(" * 50_000 + "x" + ")" * 50_000)


def test_matches_registry_f1():
    ast = parse_expression("x*sin(x)")
    for x in np.linspace(0, 10, 1000):
        assert abs(ast(float(x)) - f1(float(x))) <= 1e-15


ALPHABET = b"x0123456789.+-*/^() esincoqrtaplgbxe\t"


def fuzz_once(data: bytes) -> None:
    try:
        parse_expression(data)
    except ExpressionSyntaxError as exc:
        assert 0 <= exc.offset <= len(data)


def test_fuzz_random_bytes():
    rng = random.Random(20261015)
    for i in range(100_000):
        n = rng.randrange(0, 24)
        if i % 2:
            data = bytes(rng.choice(ALPHABET) for _ in range(n))
        else:
            data = rng.randbytes(n)
        fuzz_once(data)


@given(st.binary(max_size=64))
def test_parser_total_on_bytes(data):
    fuzz_once(data)


@given(st.text(max_size=64))
def test_parser_total_on_text(text):
    try:
        parse_expression(text)
    except ExpressionSyntaxError as exc:
        assert 0 <= exc.offset <= len(text.encode("utf-8", "surrogatepass"))

import cmath

import numpy as np
import pytest

from resonances import expression
from resonances.errors import ExpressionSyntaxError, NonAnalyticError, UnknownIdentifierError
from resonances.potentials import builtin, parse_expression


def ev(src, x, **params):
    return expression.compile_scalar(expression.parse(src, params), params)(x)


@pytest.mark.parametrize("src, x, want", [
    ("1 + 2*3", 0, 7),
    ("-x^2", 3, -9),
    ("2^3^2", 0, 512),
    ("(1 + x) / 2", 3, 2),
    ("exp(-x^2)", 1.5, np.exp(-2.25)),
    ("sqrt(x) * cosh(x) - sinh(x)", 2.0, np.sqrt(2) * np.cosh(2) - np.sinh(2)),
    ("pi * e", 0, np.pi * np.e),
    ("1.5e-1 * x", 2, 0.3),
])
def test_values(src, x, want):
    assert ev(src, x) == pytest.approx(want, rel=1e-14)


def test_params_and_complex_argument():
    w = 0.7 + 0.4j
    assert ev("-d*exp(-x^2/b^2)", w, d=2.0, b=3.0) == pytest.approx(-2 * cmath.exp(-w * w / 9), rel=1e-14)


def test_vector_matches_scalar():
    tree = expression.parse("(x^2 - 1.6)*exp(-0.1*x^2) + 1.6")
    xs = np.linspace(-3, 3, 11) * cmath.exp(0.3j)
    f, g = expression.compile_scalar(tree), expression.compile_vector(tree)
    np.testing.assert_allclose(g(xs), [f(x) for x in xs], rtol=1e-14)


@pytest.mark.parametrize("src", ["", "1 +", "exp(", "(x", "x 2", "2 ** 3", "exp()"])
def test_syntax_errors(src):
    with pytest.raises(ExpressionSyntaxError):
        expression.parse(src)


def test_unknown_names():
    with pytest.raises(UnknownIdentifierError):
        expression.parse("foo(x)")
    with pytest.raises(UnknownIdentifierError):
        expression.parse("y + 1")


def test_abs_is_real_only():
    tree = expression.parse("-exp(-abs(x))")
    assert expression.uses(tree, "call", "abs")
    f = expression.compile_scalar(tree)
    assert f(-2.0) == pytest.approx(-np.exp(-2))
    with pytest.raises(NonAnalyticError):
        f(1 + 1j)


def test_str_round_trip():
    tree = expression.parse("-3*exp(-2*x^2) + x/4")
    again = expression.parse(str(tree))
    f, g = expression.compile_scalar(tree), expression.compile_scalar(again)
    assert f(0.37) == pytest.approx(g(0.37), rel=1e-15)


@pytest.mark.parametrize("name, params, src, sub", [
    ("gaussian", {"depth": 1.3}, "-d*exp(-x^2)", {"d": 1.3}),
    ("modified_gaussian", {"b": 10.0}, "x^2*exp(-x^2/b^2)", {"b": 10.0}),
    ("rittby", {"J": 1.6}, "(x^2 - J)*exp(-0.1*x^2) + J", {"J": 1.6}),
])
def test_parse_matches_builtin(name, params, src, sub):
    p = builtin(name, **params)
    q = parse_expression(src, sub)
    for w in (0.1, 0.8 + 0.2j, 2.5, 4.0 - 0.5j):
        assert q(w) == pytest.approx(p(w), rel=1e-12)

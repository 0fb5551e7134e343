import pytest

from bsharp.errors import CoefficientError
from bsharp.expressions import (
    Const,
    Power,
    Prod,
    Sum,
    Var,
    add_all,
    const,
    differentiate,
    eval_expression,
    format_expression,
    mul_all,
    power,
    variable,
)
from bsharp.rationals import rat

P, Q = variable(0), variable(1)
NAMES = ("p", "q")


def fmt(expr, fmt="text"):
    return format_expression(expr, NAMES, fmt)


# ---------------------------------------------------------------------------
# construction and interning
# ---------------------------------------------------------------------------

def test_nodes_are_interned():
    assert variable(0) is P
    assert const(1) is const(rat(1))
    assert add_all([P, Q]) is add_all([Q, P])
    assert mul_all([P, Q]) is mul_all([Q, P])
    assert power(P, 3) is power(P, 3)


def test_like_terms_collect():
    assert fmt(add_all([P, P])) == "2*p"
    assert add_all([P, mul_all([const(-1), P])]) is const(0)
    assert add_all([const(2), const(3)]) is const(5)
    assert add_all([]) is const(0)
    assert add_all([P]) is P


def test_powers_collect():
    assert mul_all([P, P]) is power(P, 2)
    assert mul_all([P, power(P, -1)]) is const(1)
    assert mul_all([const(0), P, Q]) is const(0)
    assert mul_all([]) is const(1)
    assert power(P, 1) is P
    assert power(P, 0) is const(1)


def test_power_folds_and_distributes():
    assert power(const(3), 2) is const(9)
    assert power(power(P, 2), 3) is power(P, 6)
    assert power(mul_all([const(2), P, Q]), 2) is mul_all(
        [const(4), power(P, 2), power(Q, 2)]
    )
    with pytest.raises(CoefficientError):
        power(const(0), -1)


def test_node_kinds():
    assert isinstance(const(2), Const)
    assert isinstance(P, Var)
    assert isinstance(add_all([P, const(1)]), Sum)
    assert isinstance(mul_all([const(2), P]), Prod)
    assert isinstance(power(add_all([P, Q]), -1), Power)
    with pytest.raises(ValueError):
        variable(-1)


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------

def test_derivative_basics():
    assert differentiate(const(5), 0) is const(0)
    assert differentiate(P, 0) is const(1)
    assert differentiate(P, 1) is const(0)
    assert differentiate(add_all([P, Q]), 0) is const(1)
    assert differentiate(mul_all([const(3), P]), 0) is const(3)


def test_product_rule():
    expr = mul_all([P, Q])
    assert differentiate(expr, 0) is Q
    assert differentiate(expr, 1) is P
    sq = mul_all([P, P, Q])
    assert fmt(differentiate(sq, 0)) == "2*q*p"


def test_power_and_chain_rule():
    s = add_all([power(P, 2), power(Q, 2)])
    inv = power(s, -1)
    d = differentiate(inv, 0)
    assert d is mul_all([const(-2), P, power(s, -2)])
    assert differentiate(power(P, 3), 0) is mul_all([const(3), power(P, 2)])


def test_derivatives_commute():
    s = power(add_all([power(P, 2), Q]), -2)
    assert differentiate(differentiate(s, 0), 1) is differentiate(
        differentiate(s, 1), 0
    )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def test_eval_is_exact_on_rationals():
    s = add_all([power(P, 2), power(Q, 2)])
    d = differentiate(power(s, -1), 0)
    out = eval_expression(d, (rat(1), rat(2)))
    assert out == rat(-2, 25)


def test_eval_floats_give_floats():
    assert eval_expression(add_all([P, Q]), (0.5, 2.0)) == 2.5
    assert isinstance(eval_expression(P, (0.5, 1)), float)


def test_eval_errors():
    with pytest.raises(ZeroDivisionError):
        eval_expression(power(P, -1), (rat(0),))
    with pytest.raises(IndexError):
        eval_expression(Q, (rat(1),))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def test_sum_renders_constant_last():
    assert fmt(add_all([P, const(-1)])) == "p - 1"
    assert fmt(add_all([const(4), mul_all([const(-2), Q])])) == "-2*q + 4"


def test_negative_products_hoist_the_sign():
    assert fmt(mul_all([const(-2), P, Q])) == "-2*q*p"
    assert fmt(add_all([P, mul_all([const(-1), Q])])) == "p - q"


def test_power_rendering_round_trip_shape():
    s = add_all([power(Q, 2), power(P, 2)])
    assert fmt(power(s, -1)) == "(q^2 + p^2)^-1"
    assert fmt(differentiate(power(s, -1), 0)) == "-2*p*(q^2 + p^2)^-2"
    assert fmt(power(P, -1)) == "p^-1"


def test_constant_rendering():
    assert fmt(const(rat(1, 2))) == "1/2"
    assert fmt(mul_all([const(rat(-1, 2)), P])) == "-1/2*p"
    assert fmt(power(const(rat(1, 2)), 2)) == "1/4"


def test_latex_rendering():
    s = add_all([power(Q, 2), power(P, 2)])
    d = differentiate(power(s, -1), 0)
    assert (
        format_expression(d, NAMES, "latex")
        == r"-2 p \left(q^{2} + p^{2}\right)^{-2}"
    )
    assert format_expression(P, ("alpha",), "latex") == r"\alpha"


def test_format_rejects_unknown():
    with pytest.raises(ValueError):
        fmt(P, "html")

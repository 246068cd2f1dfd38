from fractions import Fraction

import pytest

from symplectic_restrictions.errors import GermParseError
from symplectic_restrictions.exterior import DiffForm, euler_field, wedge
from symplectic_restrictions.parsing import (
    parse_branch,
    parse_field,
    parse_form,
    parse_polynomial,
    parse_series,
    split_tuple,
)
from symplectic_restrictions.qpoly import Polynomial, TaylorSeries1D, WeightSystem

VARIABLES = ["x1", "x2", "x3"]
W = WeightSystem(weights=(6, 5, 4))


def x(i: int) -> Polynomial:
    return Polynomial.variable(i, 3)


def test_parse_polynomial():
    assert parse_polynomial("x1^2 + x3^3", VARIABLES) == x(0) ** 2 + x(2) ** 3
    assert parse_polynomial("-1/2*x2 + 3", VARIABLES) == x(1) * Fraction(-1, 2) + 3
    assert parse_polynomial("(x1 + x2)^2", VARIABLES) == x(0) ** 2 + 2 * x(0) * x(1) + x(1) ** 2
    assert parse_polynomial("x1 # trailing comment", VARIABLES) == x(0)


def test_parse_form():
    a = parse_form("dx2^dx3 + 2*x1*dx1^dx3", VARIABLES)
    dx = [DiffForm.dx(i, 3) for i in range(3)]
    assert a == wedge(dx[1], dx[2]) + wedge(dx[0], dx[2]) * (2 * x(0))
    assert parse_form("-dx3^dx1", VARIABLES) == wedge(dx[0], dx[2])


def test_parse_form_symbols():
    theta = DiffForm.dx(0, 3)
    assert parse_form("2*theta1 - theta1", VARIABLES, {"theta1": theta}) == theta


@pytest.mark.parametrize(
    "text",
    ["x1/0", "dx1*dx2", "x1 +", "", "x4", "dx1 + x1", "(x1", "dx1^2", "x1/x2"],
)
def test_parse_errors(text):
    with pytest.raises(GermParseError):
        parse_form(text, VARIABLES)


def test_parse_polynomial_rejects_forms():
    with pytest.raises(GermParseError, match="expected a polynomial"):
        parse_polynomial("dx1", VARIABLES)


def test_error_column():
    with pytest.raises(GermParseError, match="column 6"):
        parse_form("x1 + x4", VARIABLES)


def test_split_tuple():
    assert split_tuple("(t^6, (1 + t)*t^5, -t^4)") == ["t^6", "(1 + t)*t^5", "-t^4"]
    with pytest.raises(GermParseError):
        split_tuple("t^6, t^5")


def test_parse_series_and_branch():
    assert parse_series("t^3 - 2*t^5") == TaylorSeries1D({3: 1, 5: -2})
    branch = parse_branch("(t^6, t^5, -t^4)", "C", nvars=3)
    assert branch.component_orders() == (6, 5, 4)
    assert branch.label == "C"


def test_parse_branch_errors():
    with pytest.raises(GermParseError, match="does not vanish"):
        parse_branch("(1 + t, t^2, t^3)", "C")
    with pytest.raises(GermParseError, match="components"):
        parse_branch("(t, t^2)", "C", nvars=3)


def test_parse_field():
    E = euler_field(W)
    assert parse_field("E", VARIABLES, W) == E
    assert parse_field("x1*x3*E", VARIABLES, W) == E * (x(0) * x(2))
    assert parse_field("(x2, 0, 0)", VARIABLES, W).components == (x(1), Polynomial.zero(3), Polynomial.zero(3))
    with pytest.raises(GermParseError):
        parse_field("(x2, 0)", VARIABLES, W)

from fractions import Fraction
import random

import pytest

from symplectic_restrictions.checks.geometry import evaluate, symplectic_form
from symplectic_restrictions.checks.tangency import parse_branches
from symplectic_restrictions.errors import (
    DegenerateFormError,
    DimensionError,
    FrameError,
    InvariantViolationError,
    NotClosedError,
    UnsupportedGermError,
)
from symplectic_restrictions.germ import parse_germ, restriction_basis
from symplectic_restrictions.invariants import (
    GeneratingFunctionFamily,
    GeometricCondition,
    GeometricReport,
    SubmanifoldEquations,
    TangencySearchResult,
    TangentFrame,
    darboux_names,
    geometric_class,
    lagrangian_tangency_search,
    lagrangian_tangency_single,
    multigerm_tangency,
    poisson_bracket,
    tangency_order,
)
from symplectic_restrictions.parsing import parse_branch, parse_polynomial
from symplectic_restrictions.qpoly import INFINITY, Polynomial
from symplectic_restrictions.restriction import sample_normal_form

W8_TANGENCY = [5, 6, 6, 6, 9, 10, 11, 13, 15, INFINITY]
CHART = darboux_names(2)
W9_CLASS_3_CURVES = "(0, 0, 0, 0, t, 0); (t^5, 0, -t^4, 0, -t^3, -t^7 + 2*t^8 + 3*t^9)"


def chart_polynomial(text: str) -> Polynomial:
    return parse_polynomial(text, CHART)


def test_darboux_names():
    assert darboux_names(2) == ("p1", "q1", "p2", "q2")


def test_poisson_bracket():
    assert poisson_bracket(chart_polynomial("p1"), chart_polynomial("q1")) == 1
    assert poisson_bracket(chart_polynomial("q1"), chart_polynomial("p1")) == -1
    assert poisson_bracket(chart_polynomial("p1*p2"), chart_polynomial("q2")) == chart_polynomial("p1")
    assert poisson_bracket(chart_polynomial("p1"), chart_polynomial("p2")).is_zero()


def test_submanifold_equations():
    S = SubmanifoldEquations((chart_polynomial("q1 - p1^2"), chart_polynomial("q2")), lagrangian=True)
    assert S.format() == ["q1 - p1^2 = 0", "q2 = 0"]
    with pytest.raises(DimensionError, match="dependent"):
        SubmanifoldEquations((chart_polynomial("p1"), chart_polynomial("2*p1 + q1^2")))
    with pytest.raises(InvariantViolationError):
        SubmanifoldEquations((chart_polynomial("p1"), chart_polynomial("q1")), lagrangian=True)


def test_tangency_order():
    S = SubmanifoldEquations((chart_polynomial("q1"), chart_polynomial("q2")))
    b = parse_branch("(t, t^3, t^2, 0)", "C")
    assert tangency_order(b, S) == 3
    flat = parse_branch("(t, 0, t^2, 0)", "D")
    assert tangency_order(flat, S) == INFINITY
    assert multigerm_tangency([b, flat], S) == 3
    with pytest.raises(DimensionError):
        tangency_order(parse_branch("(t, t^2)", "E"), S)


def test_generating_function_family():
    fam = GeneratingFunctionFamily(2, (True, False), 3)
    assert fam.base == (0, 3)
    assert fam.fibre == (1, 2)
    assert fam.describe() == "p1,q2"
    S = fam.equations({(2, 0): 1, (1, 1): 1})
    assert S.equations == (chart_polynomial("q1 - 2*p1 - q2"), chart_polynomial("p2 + p1"))
    with pytest.raises(DimensionError):
        GeneratingFunctionFamily(2, (True,), 3)


def test_search_on_a_plane_cusp():
    result = lagrangian_tangency_search([parse_branch("(t^2, t^3)", "C")], degree_cap=5)
    assert result.order == 3
    assert not result.exact and not result.maxed
    assert result.render() == "3"


def test_search_finds_exact_witness():
    result = lagrangian_tangency_search([parse_branch("(t, 0, t^2, 0)", "C")], degree_cap=4)
    assert result.order == INFINITY
    assert result.exact
    assert result.render() == "∞"
    assert result.render(text=False) == "inf"
    assert tangency_order(parse_branch("(t, 0, t^2, 0)"), result.witness) == INFINITY


def test_maxed_result_renders_as_bound():
    assert TangencySearchResult(order=40, exact=False, maxed=True, bound=40).render() == ">=40"


def test_search_rejects_odd_charts():
    with pytest.raises(DimensionError):
        lagrangian_tangency_search([parse_branch("(t, t^2, t^3)", "C")])
    with pytest.raises(DimensionError):
        lagrangian_tangency_search([])


def test_w9_search_on_chart_curves():
    assert lagrangian_tangency_search(parse_branches(W9_CLASS_3_CURVES), 20).order == 7


def test_single_route_on_w8(w8_space, w8_rules):
    orders = [lagrangian_tangency_single(sample_normal_form(w8_space, rule)) for rule in w8_rules.rules]
    assert orders == W8_TANGENCY


def test_single_route_is_infinite_only_for_zero(w8_space):
    rng = random.Random(13)
    assert lagrangian_tangency_single(w8_space.zero()) == INFINITY
    for _ in range(200):
        a = w8_space.element([rng.choice([0, 0, 0, 1, -1, Fraction(2, 3)]) for _ in range(w8_space.dim)])
        order = lagrangian_tangency_single(a)
        assert (order == INFINITY) == a.is_zero()
        assert a.is_zero() or 0 <= order < INFINITY


def test_single_route_needs_one_branch(w9_space):
    with pytest.raises(UnsupportedGermError):
        lagrangian_tangency_single(w9_space.unit(3))


def test_single_route_needs_closed_forms(w8_all_space):
    with pytest.raises(NotClosedError):
        lagrangian_tangency_single(w8_all_space.unit(0))


def test_frame():
    with pytest.raises(FrameError):
        TangentFrame((0,), (1, 2), (0, 1, 2))
    cusp = parse_germ("germ Cusp\nvariables x y\nweights 2 3\ngenerator x^3 - y^2\nbranch (t^2, t^3)\n")
    assert TangentFrame.for_germ(cusp) == TangentFrame((0,), (0, 1), (0, 1))


def test_w8_frame(w8):
    assert TangentFrame.for_germ(w8) == TangentFrame((2,), (1, 2), (0, 1, 2))


@pytest.mark.parametrize(
    ("omega", "condition", "order"),
    [
        ("theta1 + 2*theta2 + 3*theta3 + dx1^dx4 + dx5^dx6", GeometricCondition.OMEGA_V_NONZERO, None),
        ("2*theta2 + theta3 + 3*theta4 + dx3^dx4 + dx5^dx6", GeometricCondition.KER_NOT_LINE, None),
        ("theta3 + 2*theta4 + 3*theta5 + dx3^dx4 + dx5^dx6", GeometricCondition.KER_IS_LINE, None),
        ("theta4 + 2*theta5 + 3*theta6 + dx1^dx4 + dx2^dx5 + dx3^dx6", GeometricCondition.OMEGA_W_ZERO, 9),
        ("dx1^dx4 + dx2^dx5 + dx3^dx6", GeometricCondition.LAGRANGIAN, INFINITY),
    ],
)
def test_geometric_conditions(w8, omega, condition, order):
    report = evaluate(w8, omega)
    assert report.condition is condition
    assert report.lagrangian_order == order
    assert not report.experimental


def test_multibranch_geometry_searches_chart_curves(w9, w9_space):
    text = "theta4 + 2*theta5 + 3*theta6 + dx1^dx4 + dx2^dx5 + dx3^dx6"
    pending = geometric_class(w9_space, symplectic_form(w9, text), TangentFrame.for_germ(w9))
    assert pending.condition is GeometricCondition.OMEGA_W_ZERO
    assert pending.lagrangian_order is None
    report = evaluate(w9, text)
    assert report.lagrangian_order == 7
    assert report.searched
    assert not report.experimental


def test_multibranch_one_form_route_is_opt_in(w9):
    report = evaluate(w9, "theta4 + 2*theta5 + 3*theta6 + dx1^dx4 + dx2^dx5 + dx3^dx6", experimental_multibranch=True)
    assert report.experimental
    assert not report.searched
    assert report.lagrangian_order == 7


def test_geometric_class_errors(w8, w8_space):
    frame = TangentFrame.for_germ(w8)
    with pytest.raises(DegenerateFormError):
        geometric_class(w8_space, symplectic_form(w8, "dx1^dx4 + dx2^dx5"), frame)
    with pytest.raises(NotClosedError):
        geometric_class(w8_space, symplectic_form(w8, "x1*dx2^dx3 + dx1^dx4 + dx2^dx5 + dx3^dx6"), frame)
    with pytest.raises(DimensionError):
        geometric_class(w8_space, symplectic_form(w8, "dx1"), frame)


def test_geometric_report_render():
    report = GeometricReport(GeometricCondition.OMEGA_W_ZERO, 9)
    assert report.render() == "ω|_W = 0, L_N=9"
    assert report.render(text=False) == "omega|W = 0, L_N=9"
    assert GeometricReport(GeometricCondition.LAGRANGIAN, INFINITY).render(text=False) == "lagrangian"


def test_one_forms_space_has_no_tangency(w8):
    with pytest.raises(NotClosedError):
        lagrangian_tangency_single(restriction_basis(w8, 1).unit(0))

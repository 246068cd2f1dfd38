import random

import pytest

from symplectic_restrictions.errors import DimensionError
from symplectic_restrictions.exterior import (
    DiffForm,
    VectorField,
    euler_field,
    exterior_derivative,
    format_form,
    interior_product,
    lie_derivative,
    pullback,
    wedge,
)
from symplectic_restrictions.qpoly import BranchParam, Polynomial, TaylorSeries1D, WeightSystem, monomial_basis

W = WeightSystem(weights=(6, 5, 4))
NAMES = ["x1", "x2", "x3"]
INDEX_TUPLES = {0: [()], 1: [(0,), (1,), (2,)], 2: [(0, 1), (0, 2), (1, 2)]}
INSTANCES = 200


def random_polynomial(rng: random.Random, max_degree: int = 3) -> Polynomial:
    terms = {}
    for _ in range(rng.randint(0, 3)):
        exps = tuple(rng.randint(0, max_degree) for _ in range(3))
        terms[exps] = rng.randint(-3, 3)
    return Polynomial(terms, 3)


def random_form(rng: random.Random, degree: int) -> DiffForm:
    return DiffForm({indices: random_polynomial(rng) for indices in INDEX_TUPLES[degree]}, degree, 3)


def random_field(rng: random.Random) -> VectorField:
    return VectorField(random_polynomial(rng, 2) for _ in range(3))


def random_homogeneous_form(rng: random.Random, degree: int, delta: int) -> DiffForm:
    terms = {}
    for indices in INDEX_TUPLES[degree]:
        for exps in monomial_basis(delta - sum(W[i] for i in indices), W):
            terms[exps, indices] = rng.randint(-2, 2)
    result = DiffForm.zero(degree, 3)
    for (exps, indices), c in terms.items():
        result = result + DiffForm.monomial_form(exps, indices, c)
    return result


def test_d_squared_vanishes():
    rng = random.Random(1)
    for _ in range(INSTANCES):
        degree = rng.choice([0, 1])
        a = random_form(rng, degree)
        assert exterior_derivative(exterior_derivative(a)).is_zero()


def test_lie_derivative_commutes_with_d():
    rng = random.Random(2)
    for _ in range(INSTANCES):
        X = random_field(rng)
        a = random_form(rng, rng.choice([0, 1]))
        assert lie_derivative(X, exterior_derivative(a)) == exterior_derivative(lie_derivative(X, a))


def test_lie_derivative_leibniz():
    rng = random.Random(3)
    for _ in range(INSTANCES):
        X = random_field(rng)
        a, b = random_form(rng, 1), random_form(rng, 1)
        expected = wedge(lie_derivative(X, a), b) + wedge(a, lie_derivative(X, b))
        assert lie_derivative(X, wedge(a, b)) == expected


def coefficient(a: DiffForm, i: int, j: int) -> Polynomial:
    """Antisymmetric coefficient a_ij of a 2-form."""
    if i == j:
        return Polynomial.zero(a.nvars)
    if i > j:
        return -coefficient(a, j, i)
    return a.terms.get((i, j), Polynomial.zero(a.nvars))


def lie_derivative_in_coordinates(X: VectorField, a: DiffForm) -> DiffForm:
    n = a.nvars
    v = X.components
    terms = {}
    if a.degree == 1:
        alpha = [a.terms.get((i,), Polynomial.zero(n)) for i in range(n)]
        for i in range(n):
            terms[(i,)] = sum(
                (v[k] * alpha[i].derivative(k) + alpha[k] * v[k].derivative(i) for k in range(n)),
                Polynomial.zero(n),
            )
        return DiffForm(terms, 1, n)
    for i, j in INDEX_TUPLES[2]:
        terms[i, j] = sum(
            (
                v[k] * coefficient(a, i, j).derivative(k)
                + coefficient(a, k, j) * v[k].derivative(i)
                + coefficient(a, i, k) * v[k].derivative(j)
                for k in range(n)
            ),
            Polynomial.zero(n),
        )
    return DiffForm(terms, 2, n)


def test_lie_derivative_matches_coordinate_formula():
    rng = random.Random(9)
    for _ in range(INSTANCES):
        X = random_field(rng)
        for degree in (1, 2):
            a = random_form(rng, degree)
            assert lie_derivative(X, a) == lie_derivative_in_coordinates(X, a)


def test_euler_field_scales_homogeneous_forms():
    rng = random.Random(4)
    E = euler_field(W)
    for _ in range(INSTANCES):
        degree = rng.choice([1, 2])
        delta = rng.randint(4, 20)
        a = random_homogeneous_form(rng, degree, delta)
        assert lie_derivative(E, a) == a * delta


def test_graded_law():
    rng = random.Random(5)
    E = euler_field(W)
    for _ in range(INSTANCES):
        factor = Polynomial.monomial(tuple(rng.randint(0, 2) for _ in range(3)))
        X = E * factor
        delta = rng.randint(4, 16)
        a = random_homogeneous_form(rng, 2, delta)
        image = lie_derivative(X, a)
        assert image.is_zero() or image.quasi_degrees(W) == {delta + min(factor.quasi_degrees(W))}


def test_two_forms_pull_back_to_zero_on_a_curve():
    rng = random.Random(6)
    branch = BranchParam([TaylorSeries1D({6: 1}), TaylorSeries1D({5: 1}), TaylorSeries1D({4: -1})], "C")
    for _ in range(INSTANCES):
        assert pullback(random_form(rng, 2), branch).is_zero()


def test_pullback_of_one_form():
    branch = BranchParam([TaylorSeries1D({6: 1}), TaylorSeries1D({5: 1}), TaylorSeries1D({4: -1})], "C")
    # x2*dx3 along the branch is t^5 * (-4 t^3) dt
    a = DiffForm({(2,): Polynomial.variable(1, 3)}, 1, 3)
    assert pullback(a, branch) == TaylorSeries1D({8: -4})


def test_wedge_antisymmetry():
    rng = random.Random(7)
    for _ in range(INSTANCES):
        a, b = random_form(rng, 1), random_form(rng, 1)
        assert wedge(a, b) == -wedge(b, a)
        assert wedge(a, a).is_zero()


def test_interior_product():
    dx1, dx2 = DiffForm.dx(0, 3), DiffForm.dx(1, 3)
    E = euler_field(W)
    x1 = Polynomial.variable(0, 3)
    x2 = Polynomial.variable(1, 3)
    assert interior_product(E, wedge(dx1, dx2)) == DiffForm({(1,): x1 * 6, (0,): x2 * -5}, 1, 3)
    with pytest.raises(DimensionError):
        interior_product(E, DiffForm.function(x1))


def test_repeated_index_cancels():
    dx1 = DiffForm.dx(0, 3)
    assert DiffForm({(0, 0): Polynomial.constant(1, 3)}, 2, 3).is_zero()
    assert DiffForm({(1, 0): Polynomial.constant(1, 3)}, 2, 3) == -wedge(dx1, DiffForm.dx(1, 3))


def test_degree_limits():
    top = DiffForm({(0, 1, 2): Polynomial.constant(1, 3)}, 3, 3)
    with pytest.raises(DimensionError):
        exterior_derivative(top)
    with pytest.raises(DimensionError):
        wedge(top, DiffForm.dx(0, 3))
    with pytest.raises(DimensionError):
        DiffForm.dx(0, 3) + DiffForm.zero(2, 3)


def test_format_form():
    a = DiffForm({(1, 2): Polynomial.constant(1, 3), (0, 2): Polynomial.constant(-2, 3)}, 2, 3)
    assert format_form(a, NAMES) == "-2*dx1^dx3 + dx2^dx3"
    assert format_form(DiffForm.zero(2, 3), NAMES) == "0"


def test_vector_field_shape():
    with pytest.raises(DimensionError):
        VectorField([Polynomial.zero(3), Polynomial.zero(3)])
    assert euler_field(W).apply(Polynomial.variable(0, 3) ** 2) == Polynomial.variable(0, 3) ** 2 * 12

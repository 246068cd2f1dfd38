from fractions import Fraction
import random

import pytest

from symplectic_restrictions.errors import (
    DimensionError,
    NotClosedError,
    RestrictionError,
    RulesetError,
    TangencyError,
)
from symplectic_restrictions.exterior import DiffForm, VectorField, exterior_derivative, lie_derivative, wedge
from symplectic_restrictions.germ import parse_germ, reduce_to_coordinates, restriction_basis
from symplectic_restrictions.linalg import rank
from symplectic_restrictions.qpoly import INFINITY, Polynomial
from symplectic_restrictions.restriction import (
    ClassificationRuleset,
    TangentFieldFamily,
    action_matrix,
    apply_flow,
    classify,
    hamiltonian_field,
    index_of_isotropy,
    load_ruleset,
    moduli_certificate,
    moser_system,
    normal_form_class,
    orbit_tangent_space,
    parse_guard,
    parse_ruleset,
    rescale,
    sample_normal_form,
    symplectic_multiplicity,
)

W8_MU = [2, 3, 4, 4, 5, 6, 6, 7, 7, 8]
W8_IND = [0, 0, 0, 0, 1, 1, 1, 2, 2, INFINITY]
W8_CODIMENSION = [0, 1, 2, 2, 3, 4, 5, 6, 7, 8]
W9_MU = [2, 3, 4, 5, 6, 7, 7, 8, 8, 9]
W9_IND = [0, 0, 0, 1, 1, 1, 2, 2, 3, INFINITY]
INSTANCES = 200


def random_class(space, rng: random.Random):
    return space.element([rng.choice([0, 0, 1, -1, 2, Fraction(1, 2)]) for _ in range(space.dim)])


def test_family_degrees(w8_family):
    assert [f.degree for f in w8_family.generators] == [0, 4, 5, 6, 8, 9, 10, 10]
    assert [f.label for f in w8_family.positive()] == [f"X{k}" for k in range(1, 8)]


def test_euler_action_is_diagonal(w8_space, w8_family):
    m = w8_family.action_matrices(w8_space)[0]
    for i, row in enumerate(m.entries):
        for j, value in enumerate(row):
            assert value == (w8_space.degrees[i] if i == j else 0)


def test_action_columns(w8_space, w8_family):
    matrices = w8_family.action_matrices(w8_space)
    assert matrices[7].column(0) == (0, 0, 0, 0, 0, 0, 0, -19)
    assert matrices[3].column(2) == (0, 0, 0, 0, 0, 0, Fraction(51, 2), 0)
    assert matrices[1].column(1) == (0, 0, 0, 0, -28, 0, 0, 0)


def test_action_matrices_are_graded(w8_space, w8_family, w9_space, w9_family):
    for s, fam in [(w8_space, w8_family), (w9_space, w9_family)]:
        for m in fam.action_matrices(s):
            assert m.is_graded(s.degrees)


def test_action_agrees_with_lie_derivative(w8_space, w8_family):
    rng = random.Random(11)
    matrices = w8_family.action_matrices(w8_space)
    for _ in range(INSTANCES):
        a = random_class(w8_space, rng)
        k = rng.randrange(len(w8_family))
        image = reduce_to_coordinates(w8_space, lie_derivative(w8_family.generators[k].field, a.form()))
        assert image.coords == matrices[k].apply(a.coords)


def test_zero_restrictions_stay_zero(w8, w8_all_space, w8_family):
    rng = random.Random(12)
    dx = [DiffForm.dx(i, 3) for i in range(3)]
    for _ in range(INSTANCES):
        g = rng.choice(w8.generators)
        m = Polynomial.monomial(tuple(rng.randint(0, 1) for _ in range(3)))
        i, j = rng.sample(range(3), 2)
        candidates = [wedge(dx[i], dx[j]) * (g * m), wedge(exterior_derivative(DiffForm.function(g)), dx[i] * m)]
        X = rng.choice(w8_family.generators).field
        for a in candidates:
            assert reduce_to_coordinates(w8_all_space, a).is_zero()
            assert reduce_to_coordinates(w8_all_space, lie_derivative(X, a)).is_zero()


@pytest.mark.parametrize("germ_name", ["w8", "w9"])
def test_hamiltonian_field_acts_trivially(germ_name, request):
    g = request.getfixturevalue(germ_name)
    s = request.getfixturevalue(f"{germ_name}_space")
    H = hamiltonian_field(g)
    assert not H.is_zero()
    assert action_matrix(s, H, "H").is_zero()
    assert action_matrix(restriction_basis(g, 2, closed_only=False), H, "H").is_zero()


def test_non_tangent_field(w8_space):
    X = VectorField([Polynomial.constant(1, 3), Polynomial.zero(3), Polynomial.zero(3)])
    with pytest.raises(TangencyError) as info:
        action_matrix(w8_space, X, "d/dx1")
    assert info.value.residual == "2*x1"


def test_moser_system(w8_space, w8_family):
    fields, targets = [1, 2, 3, 4, 5], [4, 5, 6, 7]
    generic = moser_system(w8_space.element([0, 1, 1, 0, 0, 0, 0, 0]), w8_family, fields, targets)
    assert len(generic) == 4
    assert rank(generic) == 4
    for coords in ([0, 1, 0, 1, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0, 0, 0]):
        assert rank(moser_system(w8_space.element(coords), w8_family, fields, targets)) < 4


def test_multiplicity_and_isotropy_columns(w8_space, w8_family, w8_rules, w9_space, w9_family, w9_rules):
    for s, fam, rules, mu, ind in [
        (w8_space, w8_family, w8_rules, W8_MU, W8_IND),
        (w9_space, w9_family, w9_rules, W9_MU, W9_IND),
    ]:
        samples = [sample_normal_form(s, rule) for rule in rules.rules]
        assert [symplectic_multiplicity(a, fam) for a in samples] == mu
        assert [index_of_isotropy(a) for a in samples] == ind


def test_classification_table(w8_space, w8_family, w8_rules):
    reports = [classify(sample_normal_form(w8_space, rule), w8_rules, w8_family) for rule in w8_rules.rules]
    assert [r.class_label for r in reports] == [rule.class_label for rule in w8_rules.rules]
    assert [r.codimension for r in reports] == W8_CODIMENSION
    assert [r.min_symplectic_dim for r in reports] == [4, 4, 4, 4, 6, 6, 6, 6, 6, 6]
    assert [len(r.moduli) for r in reports] == [2, 2, 2, 2, 2, 2, 1, 1, 0, 0]
    assert reports[-1].normal_form == "0"
    assert reports[-1].sign == "n/a"


def test_classify_odd_pivot_absorbs_sign(w8_space, w8_family, w8_rules):
    report = classify(w8_space.element([-1, 2, 0, 0, 0, 0, 0, 0]), w8_rules, w8_family)
    assert report.class_label == "W8^0"
    assert report.sign == "n/a"
    assert [m.exact for m in report.moduli] == ["2", "0"]
    assert report.pivot == 1


def test_classify_irrational_modulus(w8_space, w8_family, w8_rules):
    report = classify(w8_space.element([8, 1, 0, 0, 0, 0, 0, 0]), w8_rules, w8_family)
    c1 = report.moduli[0]
    assert not c1.rational
    assert c1.exponent == Fraction(-10, 9)
    assert abs(float(c1.decimal) - 8 ** (-10 / 9)) < 1e-9
    with pytest.raises(RestrictionError, match="irrational"):
        normal_form_class(w8_space, report)


def test_classify_eliminates(w8_space, w8_family, w8_rules):
    a = w8_space.element([1, 2, 3, 5, 7, 1, -1, 4])
    report = classify(a, w8_rules, w8_family)
    assert report.class_label == "W8^0"
    assert [m.exact for m in report.moduli] == ["2", "3"]
    assert report.residual_coords[3:] == [0, 0, 0, 0, 0]
    assert {step.index for step in report.trace} <= {4, 5, 6, 7, 8}
    assert report.ruleset_verified


def test_even_pivot_sign(w8_space, w8_family, w8_rules):
    minus = classify(w8_space.element([0, -1, 0, 2, 0, 0, 3, 0]), w8_rules, w8_family)
    assert (minus.class_label, minus.sign) == ("W8^2a", "-")
    assert [m.exact for m in minus.moduli] == ["2", "3"]
    reflected = classify(w8_space.element([0, 1, 0, -2, 0, 0, 3, 0]), w8_rules, w8_family)
    assert reflected.sign == "+"
    assert [m.exact for m in reflected.moduli] == ["2", "-3"]


def test_classify_w9_top_class(w9_space, w9_family, w9_rules):
    e9 = w9_space.unit(8)
    report = classify(e9, w9_rules, w9_family)
    assert (report.class_label, report.sign) == ("W9^8", "+")
    assert report.index_of_isotropy == 3
    assert classify(-e9, w9_rules, w9_family).sign == "-"


def test_normal_form_round_trip(w8_space, w8_family, w8_rules):
    report = classify(w8_space.element([0, 0, 0, 1, 2, 3, 0, 0]), w8_rules, w8_family)
    again = classify(normal_form_class(w8_space, report), w8_rules, w8_family)
    assert again.normal_form == report.normal_form
    certificate = moduli_certificate(w8_space, report, w8_family)
    assert certificate.directions == ("theta5", "theta6")


def test_flow_stays_in_orbit(w8_space, w8_family, w8_rules):
    a = sample_normal_form(w8_space, w8_rules.rule("W8^3"))
    x3E = action_matrix(w8_space, w8_family.generators[1].field, "X1")
    moved = apply_flow(a, x3E, Fraction(1))
    assert moved.coords == (0, 0, 0, 1, 2, 3, 17, -171)
    assert classify(moved, w8_rules, w8_family).normal_form == classify(a, w8_rules, w8_family).normal_form


def test_flow_needs_nilpotent_action(w8_space, w8_family):
    euler = w8_family.action_matrices(w8_space)[0]
    with pytest.raises(RestrictionError, match="nilpotently"):
        apply_flow(w8_space.unit(0), euler, Fraction(1))


def test_rescale(w8_space, w8_family, w8_rules):
    a = sample_normal_form(w8_space, w8_rules.rule("W8^5"))
    scaled = rescale(a, Fraction(2))
    assert scaled.coords[5:7] == (2**15, 2 * 2**17)
    assert classify(scaled, w8_rules, w8_family).normal_form == classify(a, w8_rules, w8_family).normal_form
    with pytest.raises(DimensionError):
        rescale(a, Fraction(0))


def test_isotropy_is_infinite_only_for_zero(w8_space):
    rng = random.Random(13)
    for _ in range(30):
        a = random_class(w8_space, rng)
        assert (index_of_isotropy(a) == INFINITY) == a.is_zero()
    assert index_of_isotropy(w8_space.zero()) == INFINITY


def test_isotropy_needs_closed_forms(w8_all_space):
    with pytest.raises(NotClosedError):
        index_of_isotropy(w8_all_space.unit(0))


def test_orbit_tangent_space_of_zero(w8_space, w8_family):
    assert orbit_tangent_space(w8_space.zero(), w8_family) == []


def test_parse_guard():
    atoms = parse_guard("c1==0&c2*c3!=0", 8)
    assert [str(a) for a in atoms] == ["c1==0", "c2*c3!=0"]
    assert atoms[1].holds([0, 1, 2]) and not atoms[1].holds([0, 1, 0])
    assert len(parse_guard("zero", 3)) == 3


@pytest.mark.parametrize("guard", ["c1>0", "x1==0", "c9!=0"])
def test_bad_guards(guard):
    with pytest.raises(RulesetError):
        parse_guard(guard, 8)


@pytest.mark.parametrize(
    "text",
    [
        "rules guard=c1!=0 class=A pivot=1",
        "rule guard=c1!=0 pivot=1",
        "rule guard=c1!=0 class=A pivot=1 colour=red",
        "rule guard=zero class=A pivot=1",
        "rule guard=c1!=0 class=A",
        "rule guard=c1!=0 class=A pivot=1 moduli=9",
        "# only a comment",
    ],
)
def test_ruleset_errors(text):
    with pytest.raises(RulesetError):
        parse_ruleset(text, 8)


def test_ruleset_order_and_lookup(w8_rules):
    labels = [rule.class_label for rule in w8_rules.rules]
    assert labels == ["W8^0", "W8^1", "W8^2a", "W8^2b", "W8^3", "W8^4", "W8^5", "W8^6", "W8^7", "W8^8"]
    assert w8_rules.match([0, 1, 0, 0, 0, 0, 0, 0]).class_label == "W8^2a"
    assert w8_rules.rule("W8^2a").sign_sensitive
    with pytest.raises(RulesetError):
        w8_rules.rule("W8^9")


def test_ruleset_dimension_mismatch(w8_space, w8_family, w9_rules):
    with pytest.raises(RulesetError):
        w9_rules.validate(w8_space, w8_family)
    with pytest.raises(RulesetError):
        classify(w8_space.unit(0), w9_rules, w8_family)


def test_ruleset_validation_catches_uncovered_indices(w8_space, w8_family):
    text = "rule guard=c1!=0 class=A pivot=1 moduli=2,3 eliminate=4,5,6,7 sign_sensitive=false\nrule guard=zero class=Z"
    with pytest.raises(RulesetError, match="unaccounted"):
        parse_ruleset(text, 8).validate(w8_space, w8_family)


def test_missing_ruleset_file(w8_space, w8_family, tmp_path):
    with pytest.raises(RulesetError):
        load_ruleset(w8_space, w8_family, str(tmp_path / "absent.rules"))


def test_generic_ruleset():
    cusp = parse_germ("germ Cusp\nvariables x y\nweights 2 3\ngenerator x^3 - y^2\nbranch (t^2, t^3)\n")
    s = restriction_basis(cusp, 2)
    fam = TangentFieldFamily.for_germ(cusp, s)
    assert [f.text for f in fam.generators] == ["E", "x*E"]
    rules = load_ruleset(s, fam)
    assert not rules.verified
    assert [rule.class_label for rule in rules.rules] == ["Cusp^0", "Cusp^1", "Cusp^2"]
    assert rules.rules[0].eliminate == (1,)
    report = classify(s.element([3, 5]), rules, fam)
    assert report.class_label == "Cusp^0"
    assert report.residual_coords == [3, 0]
    assert not report.ruleset_verified


def test_generic_ruleset_for_w8_is_unverified(w8_space, w8_family):
    rules = ClassificationRuleset.generic(w8_space, w8_family)
    assert not rules.verified
    assert rules.rules[-1].is_zero_class
    assert len(rules.rules) == w8_space.dim + 1

import pytest

from symplectic_restrictions.germ import GermDefinition, RestrictionSpace, load_germ, restriction_basis
from symplectic_restrictions.restriction import ClassificationRuleset, TangentFieldFamily, load_ruleset


@pytest.fixture(scope="session")
def w8() -> GermDefinition:
    return load_germ("W8")


@pytest.fixture(scope="session")
def w9() -> GermDefinition:
    return load_germ("W9")


@pytest.fixture(scope="session")
def w8_space(w8: GermDefinition) -> RestrictionSpace:
    return restriction_basis(w8, 2)


@pytest.fixture(scope="session")
def w9_space(w9: GermDefinition) -> RestrictionSpace:
    return restriction_basis(w9, 2)


@pytest.fixture(scope="session")
def w8_all_space(w8: GermDefinition) -> RestrictionSpace:
    return restriction_basis(w8, 2, closed_only=False)


@pytest.fixture(scope="session")
def w8_family(w8: GermDefinition, w8_space: RestrictionSpace) -> TangentFieldFamily:
    return TangentFieldFamily.for_germ(w8, w8_space)


@pytest.fixture(scope="session")
def w9_family(w9: GermDefinition, w9_space: RestrictionSpace) -> TangentFieldFamily:
    return TangentFieldFamily.for_germ(w9, w9_space)


@pytest.fixture(scope="session")
def w8_rules(w8_space: RestrictionSpace, w8_family: TangentFieldFamily) -> ClassificationRuleset:
    return load_ruleset(w8_space, w8_family)


@pytest.fixture(scope="session")
def w9_rules(w9_space: RestrictionSpace, w9_family: TangentFieldFamily) -> ClassificationRuleset:
    return load_ruleset(w9_space, w9_family)

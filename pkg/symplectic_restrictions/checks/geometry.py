from dataclasses import replace

from loguru import logger

from symplectic_restrictions.check import Check, CheckInstance, CheckInstanceOutput, golden_records
from symplectic_restrictions.checks.tangency import parse_branches
from symplectic_restrictions.errors import UnsupportedGermError
from symplectic_restrictions.exterior import DiffForm
from symplectic_restrictions.germ import GermDefinition, RestrictionClass, RestrictionSpace, restriction_basis
from symplectic_restrictions.invariants import (
    GeometricCondition,
    GeometricReport,
    TangencySearchResult,
    TangentFrame,
    geometric_class,
    lagrangian_tangency_search,
)
from symplectic_restrictions.parsing import parse_form
from symplectic_restrictions.paths import GOLDEN_DIR
from symplectic_restrictions.qpoly import format_order
from symplectic_restrictions.restriction import TangentFieldFamily, classify, load_ruleset
from symplectic_restrictions.tables import Table


def symplectic_form(germ: GermDefinition, text: str) -> DiffForm:
    """Parse a 2-form on the ambient symplectic space; basis labels of the germ may appear as symbols."""
    s = restriction_basis(germ, 2)
    variables = [f"x{i + 1}" for i in range(germ.symplectic_dim)]
    symbols = {label: form.extend(germ.symplectic_dim) for label, form in s.symbols().items()}
    return parse_form(text, variables, symbols)


def chart_search(a: RestrictionClass, degree_cap: int) -> TangencySearchResult:
    """Generating-function search for L_N along the golden chart curves of the class of a.

    Raises:
        UnsupportedGermError: the class has no chart curves in invariants.csv.
    """
    s = a.space
    fam = TangentFieldFamily.for_germ(s.germ, s)
    label = classify(a, load_ruleset(s, fam), fam).class_label
    charts = [r for r in Table.load(GOLDEN_DIR / "invariants.csv").records() if r["germ"] == s.germ.name]
    chart = next((r for r in charts if r["class"] == label), None)
    if chart is None:
        raise UnsupportedGermError(f"no chart curves for class {label} of {s.germ.name}")
    logger.debug(f"L_N of {label} searched along {chart['branches']}")
    return lagrangian_tangency_search(parse_branches(chart["branches"]), degree_cap)


def evaluate(
    germ: GermDefinition,
    text: str,
    degree_cap: int = 20,
    experimental_multibranch: bool = False,
    space: RestrictionSpace | None = None,
) -> GeometricReport:
    """Geometric condition of a symplectic realization; multi-branch L_N comes from the chart-curve search
    unless the experimental 1-form route is requested."""
    s = space if space is not None else restriction_basis(germ, 2)
    report = geometric_class(s, symplectic_form(germ, text), TangentFrame.for_germ(germ), experimental_multibranch)
    if report.condition is GeometricCondition.OMEGA_W_ZERO and report.lagrangian_order is None:
        result = chart_search(s.element(report.restriction), degree_cap)
        if result.maxed:
            logger.warning(f"L_N search reached the degree cap {degree_cap}; {result.bound} is a lower bound")
        report = replace(report, lagrangian_order=result.order, searched=True)
    return report


class CheckInstanceOutputGeometry(CheckInstanceOutput):
    pass


class CheckGeometry(Check):
    def _get_output_class(self) -> type[CheckInstanceOutput]:
        return CheckInstanceOutputGeometry

    def _check(self, instance: CheckInstance, germ: GermDefinition) -> tuple[list[str], str]:
        rows = golden_records(instance, germ.name)
        mismatches = []
        searched = 0
        for row in rows:
            where = f"{instance.golden} {row['class']}"
            report = evaluate(germ, row["omega"])
            searched += report.searched
            if report.condition.value != row["condition"]:
                mismatches.append(f"{where}: {report.condition.value}, expected {row['condition']}")
            if row["L_N"] != "-":
                order = "-" if report.lagrangian_order is None else format_order(report.lagrangian_order)
                if order != row["L_N"]:
                    mismatches.append(f"{where} L_N: {order}, expected {row['L_N']}")
        return mismatches, f"{len(rows)} symplectic forms, {searched} L_N values from the chart-curve search"

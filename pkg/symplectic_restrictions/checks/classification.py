from fractions import Fraction
import random

from pydantic import Field
import sympy

from symplectic_restrictions.check import Check, CheckInstance, CheckInstanceOutput, golden_records
from symplectic_restrictions.germ import GermDefinition, RestrictionClass, restriction_basis
from symplectic_restrictions.qpoly import format_order
from symplectic_restrictions.restriction import (
    ClassificationRuleset,
    NormalFormReport,
    TangentFieldFamily,
    action_matrix,
    apply_flow,
    classify,
    load_ruleset,
    moduli_certificate,
    normal_form_class,
    rescale,
)


class CheckInstanceClassification(CheckInstance):
    orbit_samples: int = Field(default=2, ge=0, description="Random orbit points classified per class.")


class CheckInstanceOutputClassification(CheckInstanceOutput):
    check_instance: CheckInstanceClassification


def same_normal_form(x: NormalFormReport, y: NormalFormReport) -> bool:
    if (x.class_label, x.sign, len(x.moduli)) != (y.class_label, y.sign, len(y.moduli)):
        return False
    return all(sympy.simplify(m.value() - n.value()) == 0 for m, n in zip(x.moduli, y.moduli, strict=True))


def orbit_sample(a: RestrictionClass, fam: TangentFieldFamily, rng: random.Random) -> RestrictionClass:
    """Move a class by two random unipotent flows and a random weighted scaling."""
    positive = fam.positive()
    for f in rng.sample(positive, min(2, len(positive))):
        t = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        a = apply_flow(a, action_matrix(a.space, f.field, f.label), t)
    return rescale(a, Fraction(rng.choice([-2, -1, 1, 2]), rng.randint(1, 2)))


class CheckClassification(Check):
    """Normal-form sweep: labels, codimension, symplectic multiplicity, index of isotropy and realizability.

    Each representative is also classified again from its normal form, its negative is classified when the class is
    sign sensitive, random points of its orbit are classified and the moduli are certified transversal to the orbit.
    """

    instance_class = CheckInstanceClassification

    def _get_output_class(self) -> type[CheckInstanceOutput]:
        return CheckInstanceOutputClassification

    def _check(self, instance: CheckInstanceClassification, germ: GermDefinition) -> tuple[list[str], str]:
        s = restriction_basis(germ, 2)
        fam = TangentFieldFamily.for_germ(germ, s)
        rules = load_ruleset(s, fam)
        rng = random.Random(self.seed)
        mismatches = []
        rows = golden_records(instance, germ.name)
        for row in rows:
            where = f"{instance.golden} {row['class']}"
            a = s.element(row["coords"].split(";"))
            report = classify(a, rules, fam)
            moduli = ";".join(m.exact for m in report.moduli) or "-"
            actual = {
                "class": report.class_label,
                "moduli": moduli,
                "codimension": str(report.codimension),
                "mu": str(report.symplectic_multiplicity),
                "ind": format_order(report.index_of_isotropy),
                "min_dim": str(report.min_symplectic_dim),
            }
            for column, value in actual.items():
                if value != row[column]:
                    mismatches.append(f"{where} {column}: {value}, expected {row[column]}")
            mismatches.extend(self._orbit_checks(where, a, report, rules, fam, instance.orbit_samples, rng))
        return mismatches, f"{len(rows)} classes, ruleset {rules.source}, seed {self.seed}"

    def _orbit_checks(
        self,
        where: str,
        a: RestrictionClass,
        report: NormalFormReport,
        rules: ClassificationRuleset,
        fam: TangentFieldFamily,
        samples: int,
        rng: random.Random,
    ) -> list[str]:
        s = a.space
        mismatches = []
        again = classify(normal_form_class(s, report), rules, fam)
        if not same_normal_form(again, report):
            mismatches.append(f"{where}: normal form classifies as {again.class_label} {again.normal_form}")
        if report.pivot is None:
            return mismatches
        if report.moduli:
            moduli_certificate(s, report, fam)
        if rules.rule(report.class_label).sign_sensitive:
            flipped = classify(-a, rules, fam)
            if flipped.class_label != report.class_label or flipped.sign == report.sign:
                mismatches.append(f"{where}: the negative classifies as {flipped.class_label} {flipped.sign}")
        for _ in range(samples):
            b = orbit_sample(a, fam, rng)
            moved = classify(b, rules, fam)
            if not same_normal_form(moved, report):
                mismatches.append(f"{where}: orbit point {b} classifies as {moved.class_label} {moved.normal_form}")
        return mismatches

from symplectic_restrictions.check import Check, CheckInstance, CheckInstanceOutput, golden_records
from symplectic_restrictions.exterior import DiffForm
from symplectic_restrictions.germ import GermDefinition, monomial_forms, reduce_to_coordinates, restriction_basis


class CheckInstanceOutputRelations(CheckInstanceOutput):
    pass


class CheckRelations(Check):
    """Every listed relation, and every 2-form in the blanket (`*`) degrees, has zero restriction."""

    def _get_output_class(self) -> type[CheckInstanceOutput]:
        return CheckInstanceOutputRelations

    def _check(self, instance: CheckInstance, germ: GermDefinition) -> tuple[list[str], str]:
        s = restriction_basis(germ, 2, closed_only=False)
        mismatches = []
        checked = 0
        for row in golden_records(instance, germ.name):
            delta = int(row["degree"])
            if row["relation"] == "*":
                keys = monomial_forms(germ.weights, 2, delta)
                forms = [DiffForm.monomial_form(exps, indices) for exps, indices in keys]
            else:
                forms = [germ.parse_form(row["relation"])]
            for a in forms:
                checked += 1
                if a.quasi_degrees(germ.weights) != {delta}:
                    mismatches.append(f"{instance.golden} {germ.name} {row['relation']}: not of quasi-degree {delta}")
                    continue
                b = reduce_to_coordinates(s, a)
                if not b.is_zero():
                    mismatches.append(f"{instance.golden} {germ.name} degree {delta}: {germ.format_form(a)} = {b}")
        return mismatches, f"{checked} forms reduce to zero up to the cutoff {s.cutoff}"

from symplectic_restrictions.check import Check, CheckInstance, CheckInstanceOutput, golden_records
from symplectic_restrictions.germ import GermDefinition, RestrictionSpace, format_coordinates, restriction_basis
from symplectic_restrictions.parsing import parse_field
from symplectic_restrictions.restriction import TangentFieldFamily, action_matrix


def parse_image(s: RestrictionSpace, text: str) -> tuple:
    """Coordinates of a combination of basis labels such as `51/2*theta7`; `0` is the zero class."""
    return s.zero().coords if text.strip() == "0" else s.parse(text).coords


class CheckInstanceOutputActions(CheckInstanceOutput):
    pass


class CheckActions(Check):
    def _get_output_class(self) -> type[CheckInstanceOutput]:
        return CheckInstanceOutputActions

    def _check(self, instance: CheckInstance, germ: GermDefinition) -> tuple[list[str], str]:
        s = restriction_basis(germ, 2)
        fam = TangentFieldFamily.for_germ(germ, s)
        generators = {f.label: f for f in fam.generators}
        rows = golden_records(instance, germ.name)
        mismatches = []
        expected_fields = sorted({r["field"] for r in rows})
        if sorted(generators) != expected_fields:
            mismatches.append(f"{instance.golden} {germ.name}: fields {sorted(generators)}, expected {expected_fields}")
        for row in rows:
            where = f"{instance.golden} {germ.name} {row['field']} on {row['basis']}"
            f = generators.get(row["field"])
            if f is None:
                continue
            if f.field != parse_field(row["definition"], germ.variables, germ.weights):
                mismatches.append(f"{where}: field is {f.text}, expected {row['definition']}")
                continue
            if row["basis"] not in s.labels:
                mismatches.append(f"{where}: unknown basis label")
                continue
            actual = action_matrix(s, f.field, f.label).column(s.labels.index(row["basis"]))
            expected = parse_image(s, row["image"])
            if actual != expected:
                mismatches.append(f"{where}: {format_coordinates(actual, s.labels)}, expected {row['image']}")
        return mismatches, f"{len(fam)} fields x {s.dim} basis elements"

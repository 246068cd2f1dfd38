from typing import Literal

from pydantic import Field

from symplectic_restrictions.check import Check, CheckInstance, CheckInstanceOutput, golden_records
from symplectic_restrictions.germ import GermDefinition, restriction_basis


class CheckInstanceBasis(CheckInstance):
    variant: Literal["closed", "all"] = Field(description="Restrictions of closed 2-forms or of all 2-forms.")


class CheckInstanceOutputBasis(CheckInstanceOutput):
    check_instance: CheckInstanceBasis


class CheckBasis(Check):
    instance_class = CheckInstanceBasis

    def _get_output_class(self) -> type[CheckInstanceOutput]:
        return CheckInstanceOutputBasis

    def _check(self, instance: CheckInstanceBasis, germ: GermDefinition) -> tuple[list[str], str]:
        s = restriction_basis(germ, 2, closed_only=instance.variant == "closed")
        rows = [r for r in golden_records(instance, germ.name) if r["variant"] == instance.variant]
        mismatches = []
        if len(rows) != s.dim:
            mismatches.append(f"{instance.golden}: dimension {s.dim}, expected {len(rows)}")
        for row, element in zip(rows, s.basis, strict=False):
            where = f"{instance.golden} {germ.name} {instance.variant} {row['label']}"
            if element.label != row["label"]:
                mismatches.append(f"{where}: label {element.label}")
            if element.degree != int(row["degree"]):
                mismatches.append(f"{where}: degree {element.degree}, expected {row['degree']}")
            if element.form != germ.parse_form(row["form"]):
                mismatches.append(f"{where}: form {germ.format_form(element.form)}, expected {row['form']}")
        degrees = ",".join(map(str, s.degrees))
        return mismatches, f"dim {s.dim}, degrees {degrees}; {s.certificate.describe()}"

from typing import Literal

from pydantic import Field

from symplectic_restrictions.check import Check, CheckInstance, CheckInstanceOutput, golden_records
from symplectic_restrictions.germ import GermDefinition, restriction_basis
from symplectic_restrictions.invariants import darboux_names, lagrangian_tangency_search, lagrangian_tangency_single
from symplectic_restrictions.parsing import parse_branch, parse_polynomial
from symplectic_restrictions.qpoly import BranchParam, format_order, substitute_branch


def parse_branches(text: str) -> list[BranchParam]:
    return [parse_branch(part, f"C{k + 1}") for k, part in enumerate(text.split(";"))]


class CheckInstanceTangency(CheckInstance):
    route: Literal["single", "search"] = Field(description="1-form route on classes or generating-function search.")
    classes_golden: str = Field(default="classification.csv", description="Representatives for the single route.")
    degree_cap: int = Field(default=20, gt=0, description="Degree cap D of the generating functions.")


class CheckInstanceOutputTangency(CheckInstanceOutput):
    check_instance: CheckInstanceTangency


class CheckTangency(Check):
    instance_class = CheckInstanceTangency

    def _get_output_class(self) -> type[CheckInstanceOutput]:
        return CheckInstanceOutputTangency

    def _check(self, instance: CheckInstanceTangency, germ: GermDefinition) -> tuple[list[str], str]:
        rows = golden_records(instance, germ.name)
        if instance.route == "single":
            return self._single(instance, germ, rows)
        return self._search(instance, rows)

    def _single(
        self, instance: CheckInstanceTangency, germ: GermDefinition, rows: list[dict[str, str]]
    ) -> tuple[list[str], str]:
        s = restriction_basis(germ, 2)
        classes = {r["class"]: r["coords"] for r in golden_records(instance, germ.name, instance.classes_golden)}
        mismatches = []
        for row in rows:
            a = s.element(classes[row["class"]].split(";"))
            order = format_order(lagrangian_tangency_single(a))
            if order != row["L_N"]:
                mismatches.append(f"{instance.golden} {row['class']} L_N: {order}, expected {row['L_N']}")
        return mismatches, f"{len(rows)} classes through the 1-form route"

    def _search(self, instance: CheckInstanceTangency, rows: list[dict[str, str]]) -> tuple[list[str], str]:
        mismatches = []
        maxed = 0
        for row in rows:
            where = f"{instance.golden} {row['class']}"
            branches = parse_branches(row["branches"])
            names = darboux_names(branches[0].nvars // 2)
            for equation in row["equations"].split(";"):
                h = parse_polynomial(equation, names)
                if any(substitute_branch(h, b) for b in branches):
                    mismatches.append(f"{where}: a branch leaves the normal-form variety ({equation.strip()} != 0)")
            targets = {"L_N": branches}
            if row["L2"] != "-":
                targets["L2"] = branches[-1:]
            for column, bs in targets.items():
                result = lagrangian_tangency_search(bs, instance.degree_cap)
                expected = row[column]
                if expected == "inf":
                    ok = result.exact or result.maxed
                    maxed += result.maxed
                else:
                    ok = not result.maxed and format_order(result.order) == expected
                if not ok:
                    mismatches.append(f"{where} {column}: {result.render(text=False)}, expected {expected}")
        return mismatches, f"{len(rows)} chart curves, {maxed} infinite entries certified only up to the bound"

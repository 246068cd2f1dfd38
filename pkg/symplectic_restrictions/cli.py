"""Commands behind the `restrictions` script. Each command turns a RunConfig into a Table."""

from enum import Enum
from fractions import Fraction
from typing import Literal

from loguru import logger
from pydantic import BaseModel, Field, model_validator
from rich.console import Console
from rich.progress import Progress

from symplectic_restrictions.check import Check, CheckConfig, CheckInstanceOutput
from symplectic_restrictions.checks.geometry import evaluate
from symplectic_restrictions.checks.tangency import parse_branches
from symplectic_restrictions.errors import GermParseError, VerificationMismatch
from symplectic_restrictions.germ import (
    GermDefinition,
    RestrictionClass,
    RestrictionSpace,
    format_coordinates,
    load_germ,
    restriction_basis,
)
from symplectic_restrictions.invariants import (
    TangencySearchResult,
    lagrangian_tangency_search,
    lagrangian_tangency_single,
)
from symplectic_restrictions.parsing import parse_field
from symplectic_restrictions.paths import CHECKS_DIR, GOLDEN_DIR
from symplectic_restrictions.qpoly import format_order
from symplectic_restrictions.restriction import (
    ClassificationRuleset,
    NormalFormReport,
    TangentFieldFamily,
    action_matrix,
    check_tangent,
    classify,
    load_ruleset,
    sample_normal_form,
)
from symplectic_restrictions.tables import Table
from symplectic_restrictions.tinydb_helpers.check_data import get_executed_checks


class OutputFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"
    JSONL = "jsonl"


class Command(str, Enum):
    BASIS = "basis"
    ACTIONS = "actions"
    CLASSIFY = "classify"
    INVARIANTS = "invariants"
    GEOMETRY = "geometry"
    VERIFY = "verify"


class RunConfig(BaseModel):
    germ: str = Field(default="W8", description="Built-in germ name or path of a germ definition file.")
    command: Command = Field(description="The command to run.")
    output_format: OutputFormat = Field(default=OutputFormat.TEXT, description="Rendering of the result table.")
    cutoff: int | None = Field(default=None, gt=0, description="Largest quasi-degree examined for stabilization.")
    degree_cap: int = Field(default=20, gt=0, description="Degree cap of the generating-function search.")
    seed: int = Field(default=0, description="Seed of the sampled orbit checks.")
    all_forms: bool = Field(default=False, description="basis: restrictions of all forms instead of closed ones.")
    form_degree: Literal[1, 2] = Field(default=2, description="basis: degree of the forms.")
    verify_paper: bool = Field(default=False, description="actions/classify: diff against the golden tables.")
    field: str | None = Field(default=None, description="actions: a single field such as `x1*x3*E`.")
    form: str | None = Field(default=None, description="classify: a closed 2-form on the germ's variables.")
    coords: str | None = Field(default=None, description="classify: comma separated basis coordinates.")
    table: bool = Field(default=False, description="classify: one representative per class.")
    class_label: str | None = Field(default=None, description="invariants: restrict to one class.")
    omega: str | None = Field(default=None, description="geometry: a symplectic form on the ambient space.")
    experimental_multibranch: bool = Field(default=False, description="Allow the 1-form route on multi-germs.")
    ruleset: str | None = Field(default=None, description="classify: path of a ruleset file.")
    resume: bool = Field(default=False, description="verify: skip instances whose latest run passed.")

    @model_validator(mode="after")
    def _one_classify_input(self) -> "RunConfig":
        if self.command is Command.CLASSIFY:
            given = sum(1 for value in (self.form, self.coords, self.table or None) if value)
            if given != 1:
                raise ValueError("classify takes exactly one of --form, --coords and --table")
        return self


def _closed_space(cfg: RunConfig) -> RestrictionSpace:
    return restriction_basis(load_germ(cfg.germ), 2, True, cfg.cutoff)


def _ruleset(cfg: RunConfig, s: RestrictionSpace, fam: TangentFieldFamily) -> ClassificationRuleset:
    rules = load_ruleset(s, fam, cfg.ruleset)
    if not rules.verified:
        logger.warning(f"classes of {s.germ.name} come from an unverified ruleset")
    return rules


def _suite_mismatches(suite: str, germ: GermDefinition) -> list[str]:
    """Run one check suite for the germ without recording the outcome."""
    path = CHECKS_DIR / suite
    config = CheckConfig.load(path)
    if config is None:
        raise GermParseError(f"check suite {path} could not be loaded")
    check = Check.load_class(config.run_config.module_name, config.run_config.class_name, config)
    outputs = check.execute(None, germ, set(), save=False)
    if not outputs:
        raise VerificationMismatch(f"no golden table in {suite} covers germ {germ.name}")
    return [m for output in outputs for m in output.mismatches]


def _verified_note(suite: str, germ: GermDefinition) -> str:
    mismatches = _suite_mismatches(suite, germ)
    if mismatches:
        for m in mismatches:
            logger.error(m)
        raise VerificationMismatch(f"{len(mismatches)} cells disagree with the golden tables: {mismatches[0]}")
    return f"golden tables ({suite}): PASS"


def cmd_basis(cfg: RunConfig) -> Table:
    g = load_germ(cfg.germ)
    s = restriction_basis(g, cfg.form_degree, not cfg.all_forms, cfg.cutoff)
    kind = "" if cfg.all_forms else "closed "
    title = f"Restrictions of {kind}{cfg.form_degree}-forms to {g.name}"
    table = Table(title=title, columns=["label", "form", "degree"])
    for element in s.basis:
        table.add_row(element.label, g.format_form(element.form), element.degree)
    dims = ", ".join(f"{d}:{p.quotient_dim}" for d, p in sorted(s.pieces.items()) if p.quotient_dim)
    table.notes = [
        f"dimension {s.dim}",
        f"quotient dimensions by quasi-degree: {dims or 'none'}",
        s.certificate.describe(),
    ]
    logger.info(f"{g.name}: dimension {s.dim}, stabilized at {s.cutoff}")
    return table


def cmd_actions(cfg: RunConfig) -> Table:
    s = _closed_space(cfg)
    g = s.germ
    if cfg.field:
        field = parse_field(cfg.field, g.variables, g.weights)
        check_tangent(g, cfg.field, field)
        fields = [("X", cfg.field, field)]
    else:
        fields = [(f.label, f.text, f.field) for f in TangentFieldFamily.for_germ(g, s).generators]
    title = f"Infinitesimal actions on restrictions to {g.name}"
    table = Table(title=title, columns=["field", "definition", *s.labels])
    for label, text, field in fields:
        m = action_matrix(s, field, label)
        table.add_row(label, text, *(format_coordinates(m.column(j), s.labels) for j in range(s.dim)))
    if cfg.verify_paper:
        table.notes.append(_verified_note("03_actions.yaml", g))
    logger.info(f"{g.name}: {len(fields)} fields acting on {s.dim} basis elements")
    return table


def _report_row(report: NormalFormReport) -> list[str]:
    return [
        report.class_label,
        report.sign,
        report.normal_form,
        ";".join(m.exact for m in report.moduli) or "-",
        ";".join(m.decimal for m in report.moduli) or "-",
        str(report.codimension),
        str(report.symplectic_multiplicity),
        format_order(report.index_of_isotropy),
        str(report.min_symplectic_dim),
    ]


def restriction_class(cfg: RunConfig) -> RestrictionClass:
    """The class named by --form or --coords."""
    s = _closed_space(cfg)
    if cfg.form and cfg.form.strip() == "0":
        return s.zero()
    if cfg.form:
        return s.parse(cfg.form)
    try:
        coords = [Fraction(part.strip()) for part in (cfg.coords or "").split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise GermParseError(f"malformed coordinates {cfg.coords!r}") from e
    return s.element(coords)


_CLASSIFY_COLUMNS = ["class", "sign", "normal_form", "moduli", "moduli_decimal", "codimension", "mu", "ind", "min_dim"]


def cmd_classify(cfg: RunConfig) -> Table:
    s = _closed_space(cfg)
    fam = TangentFieldFamily.for_germ(s.germ, s)
    rules = _ruleset(cfg, s, fam)
    table = Table(title=f"Symplectic classes of {s.germ.name}", columns=_CLASSIFY_COLUMNS)
    if cfg.table:
        for rule in rules.rules:
            table.add_row(*_report_row(classify(sample_normal_form(s, rule), rules, fam)))
        table.notes.append("representatives with pivot 1 and moduli 2, 3, ... in basis order")
        if cfg.verify_paper:
            table.notes.append(_verified_note("04_classification.yaml", s.germ))
        return table
    a = restriction_class(cfg)
    report = classify(a, rules, fam)
    table.add_row(*_report_row(report))
    table.notes.append(f"class of {a}")
    table.notes.extend(f"eliminated c{step.index} with {step.field} at s={step.parameter}" for step in report.trace)
    logger.info(f"{s.germ.name}: {a} is in {report.class_label}")
    return table


def _matches_class(label: str, wanted: str | None) -> bool:
    return wanted is None or label == wanted or label.endswith(f"^{wanted}")


def _search_status(results: list[TangencySearchResult]) -> str:
    if any(r.maxed for r in results):
        return "lower bound"
    return "exact witness" if any(r.exact for r in results) else "attained"


def cmd_invariants(cfg: RunConfig) -> Table:
    """Per class: index of isotropy, L_N through 1-forms, and L_N (L2) searched along the golden chart curves."""
    s = _closed_space(cfg)
    g = s.germ
    fam = TangentFieldFamily.for_germ(g, s)
    rules = _ruleset(cfg, s, fam)
    single = len(g.branches) == 1 or cfg.experimental_multibranch
    if not single:
        logger.info(f"{g.name} has {len(g.branches)} branches; L_N through 1-forms is skipped")
    curves = Table.load(GOLDEN_DIR / "invariants.csv")
    charts = {r["class"]: r for r in curves.records() if r["germ"] == g.name}
    table = Table(
        title=f"Symplectic invariants of {g.name}",
        columns=["class", "ind", "L_N_forms", "L_N_search", "L2_search", "status"],
    )
    for rule in rules.rules:
        if not _matches_class(rule.class_label, cfg.class_label):
            continue
        a = sample_normal_form(s, rule)
        report = classify(a, rules, fam)
        forms = format_order(lagrangian_tangency_single(a, cfg.experimental_multibranch)) if single else "-"
        chart = charts.get(rule.class_label)
        if chart is None:
            table.add_row(rule.class_label, format_order(report.index_of_isotropy), forms, "-", "-", "-")
            continue
        branches = parse_branches(chart["branches"])
        results = [lagrangian_tangency_search(branches, cfg.degree_cap)]
        if chart["L2"] != "-":
            results.append(lagrangian_tangency_search(branches[-1:], cfg.degree_cap))
        l2 = results[1].render(text=False) if len(results) > 1 else "-"
        table.add_row(
            rule.class_label,
            format_order(report.index_of_isotropy),
            forms,
            results[0].render(text=False),
            l2,
            _search_status(results),
        )
    if not table.rows:
        raise GermParseError(f"germ {g.name} has no class {cfg.class_label!r}")
    table.notes.append(f"generating functions of degree <= {cfg.degree_cap}; >=N marks an uncertified upper range")
    return table


def cmd_geometry(cfg: RunConfig) -> Table:
    s = _closed_space(cfg)
    g = s.germ
    if cfg.omega:
        forms = [("-", cfg.omega)]
    else:
        golden = Table.load(GOLDEN_DIR / "geometry.csv")
        forms = [(r["class"], r["omega"]) for r in golden.records() if r["germ"] == g.name]
    table = Table(title=f"Geometric conditions for {g.name}", columns=["class", "omega", "condition", "L_N"])
    experimental = searched = False
    for label, text in forms:
        report = evaluate(g, text, cfg.degree_cap, cfg.experimental_multibranch, s)
        experimental |= report.experimental
        searched |= report.searched
        order = "-" if report.lagrangian_order is None else format_order(report.lagrangian_order)
        table.add_row(label, text, report.condition.value, order)
    if experimental:
        table.notes.append("L_N of the multi-branch germ comes from the experimental 1-form route")
    if searched:
        table.notes.append(f"multi-branch L_N searched along the chart curves of its class, degree <= {cfg.degree_cap}")
    return table


def cmd_verify(cfg: RunConfig) -> Table:
    """Run every check suite for the germ, recording each outcome in the ledger."""
    g = load_germ(cfg.germ)
    keys_to_skip = get_executed_checks() if cfg.resume else set()
    checks: list[tuple[str, Check]] = []
    for path in sorted(CHECKS_DIR.glob("*.yaml")):
        config = CheckConfig.load(path)
        if config is None:
            raise GermParseError(f"check suite {path} could not be loaded")
        checks.append(
            (path.stem, Check.load_class(config.run_config.module_name, config.run_config.class_name, config, cfg.seed))
        )
    if not sum(check.num_instances(g.name, set()) for _, check in checks):
        raise VerificationMismatch(f"no check suite covers germ {g.name}")
    total = sum(check.num_instances(g.name, keys_to_skip) for _, check in checks)
    outputs: list[tuple[str, CheckInstanceOutput]] = []
    with Progress(console=Console(stderr=True), transient=True) as progress:
        progress.add_task(f"Checks for {g.name}", total=total)
        for suite, check in checks:
            outputs.extend((suite, output) for output in check.execute(progress, g, keys_to_skip))
    table = Table(title=f"Checks for {g.name}", columns=["suite", "instance", "status", "summary"])
    for suite, output in outputs:
        table.add_row(suite, output.check_instance.name, "PASS" if output.passed else "FAIL", output.summary)
        table.notes.extend(f"{output.check_instance.name}: {m}" for m in output.mismatches)
    skipped = len(keys_to_skip)
    if skipped:
        table.notes.append(f"{skipped} previously passed instances skipped")
    logger.info(f"{g.name}: {sum(o.passed for _, o in outputs)} of {len(outputs)} check instances passed")
    return table


def run(cfg: RunConfig, console: Console) -> Table:
    """Run the configured command and emit its table.

    Raises:
        VerificationMismatch: `verify` found a failing check instance (raised after the ledger is printed).
    """
    if cfg.command is Command.VERIFY:
        table = cmd_verify(cfg)
    else:
        table = {
            Command.BASIS: cmd_basis,
            Command.ACTIONS: cmd_actions,
            Command.CLASSIFY: cmd_classify,
            Command.INVARIANTS: cmd_invariants,
            Command.GEOMETRY: cmd_geometry,
        }[cfg.command](cfg)
    table.emit(cfg.output_format.value, console)
    if cfg.command is Command.VERIFY and "FAIL" in table.column("status"):
        raise VerificationMismatch(f"{table.column('status').count('FAIL')} check instances failed")
    return table

"""Symmetries of a germ acting on its algebraic restrictions.

Vector fields tangent to the germ act on restriction classes through their Lie derivatives. Fields of positive
quasi-degree act nilpotently, so the flow of such a field is an exact polynomial matrix exponential, and
classification into normal forms reduces to a sequence of exact unipotent eliminations followed by a weighted
scaling.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math
from pathlib import Path

from loguru import logger
from pydantic import BaseModel, Field
import sympy

from symplectic_restrictions.errors import (
    DimensionError,
    InvariantViolationError,
    NotClosedError,
    RestrictionError,
    RulesetError,
    TangencyError,
)
from symplectic_restrictions.exterior import VectorField, lie_derivative
from symplectic_restrictions.germ import (
    GermDefinition,
    RestrictionClass,
    RestrictionSpace,
    closed_form_generators,
    format_coordinates,
    reduce_to_coordinates,
)
from symplectic_restrictions.linalg import Matrix, mat_vec, nullspace, rank, reduce_vector, row_reduce, solve, transpose
from symplectic_restrictions.parsing import parse_field
from symplectic_restrictions.paths import RULESETS_DIR
from symplectic_restrictions.qpoly import (
    INFINITY,
    Order,
    OrderValue,
    Polynomial,
    RationalValue,
    format_polynomial,
    monomial_basis,
)


@dataclass(frozen=True)
class FamilyField:
    label: str
    text: str
    field: VectorField
    degree: int | None

    @classmethod
    def build(cls, g: GermDefinition, label: str, text: str, field: VectorField | None = None) -> "FamilyField":
        field = field if field is not None else parse_field(text, g.variables, g.weights)
        degrees = field.quasi_degrees(g.weights)
        return cls(label, text, field, degrees.pop() if len(degrees) == 1 else None)


@lru_cache(maxsize=1024)
def check_tangent(g: GermDefinition, label: str, X: VectorField) -> None:
    """Raise TangencyError unless L_X g lies in the ideal for every generator g."""
    if X.nvars != g.nvars:
        raise DimensionError(f"field {label} has {X.nvars} components for a germ in {g.nvars} variables")
    for gen in g.generators:
        image = X.apply(gen)
        if not g.ideal_contains(image):
            raise TangencyError(
                f"field {label} is not tangent to {g.name}: L_X({g.format_polynomial(gen)}) is not in the ideal",
                residual=g.format_polynomial(image),
            )


@dataclass(frozen=True)
class TangentFieldFamily:
    """Ordered generators m*E (or explicit fields) of the symmetries acting on restriction classes."""

    germ: GermDefinition
    generators: tuple[FamilyField, ...]

    def __post_init__(self) -> None:
        for f in self.generators:
            check_tangent(self.germ, f.label, f.field)
        degrees = [f.degree for f in self.generators if f.degree is not None]
        if degrees != sorted(degrees):
            raise RestrictionError(f"fields of germ {self.germ.name} must be listed by non-decreasing quasi-degree")

    @classmethod
    def for_germ(cls, g: GermDefinition, space: RestrictionSpace | None = None) -> "TangentFieldFamily":
        """The germ's listed fields, or all monomial multiples of E that can act nontrivially on `space`."""
        if g.fields:
            return cls(g, tuple(FamilyField.build(g, f.label, f.text, f.field) for f in g.fields))
        if space is None:
            raise RestrictionError(f"germ {g.name} lists no fields; a restriction space is needed to derive them")
        span = max(space.degrees, default=0) - min(space.degrees, default=0)
        euler_multiples = []
        for degree in range(span + 1):
            for exps in sorted(monomial_basis(degree, g.weights), key=lambda e: tuple(-x for x in e)):
                factor = format_polynomial(Polynomial.monomial(exps), g.variables)
                euler_multiples.append("E" if degree == 0 else f"{factor}*E")
        return cls(g, tuple(FamilyField.build(g, f"X{k}", text) for k, text in enumerate(euler_multiples)))

    def __len__(self) -> int:
        return len(self.generators)

    def action_matrices(self, s: RestrictionSpace) -> list["ActionMatrix"]:
        return [action_matrix(s, f.field, f.label) for f in self.generators]

    def positive(self) -> list[FamilyField]:
        return [f for f in self.generators if f.degree is not None and f.degree > 0]


@dataclass(frozen=True)
class ActionMatrix:
    """Entry (i, j) is the coefficient of basis element i in L_X of basis element j."""

    label: str
    degree: int | None
    entries: tuple[tuple[Fraction, ...], ...]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.entries)

    def apply(self, coords: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(mat_vec(self.entries, coords))

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.entries)

    def is_graded(self, degrees: Sequence[int]) -> bool:
        if self.degree is None:
            return False
        return all(
            degrees[i] == degrees[j] + self.degree
            for i, row in enumerate(self.entries)
            for j, value in enumerate(row)
            if value
        )


@lru_cache(maxsize=1024)
def _action_columns(s: RestrictionSpace, X: VectorField) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(reduce_to_coordinates(s, lie_derivative(X, b.form)).coords for b in s.basis)


def action_matrix(s: RestrictionSpace, X: VectorField, label: str = "X") -> ActionMatrix:
    """Matrix of L_X on the restriction space; column j holds the coordinates of L_X of basis element j.

    Raises:
        TangencyError: X is not tangent to the germ.
    """
    check_tangent(s.germ, label, X)
    columns = _action_columns(s, X)
    degrees = X.quasi_degrees(s.germ.weights)
    entries = transpose(columns, s.dim) if columns else []
    return ActionMatrix(label, degrees.pop() if len(degrees) == 1 else None, tuple(tuple(r) for r in entries))


def orbit_tangent_vectors(a: RestrictionClass, fam: TangentFieldFamily) -> list[tuple[Fraction, ...]]:
    return [m.apply(a.coords) for m in fam.action_matrices(a.space)]


def orbit_tangent_space(a: RestrictionClass, fam: TangentFieldFamily) -> Matrix:
    """Reduced row basis of the span of L_X a over the family."""
    rref, _ = row_reduce(orbit_tangent_vectors(a, fam), a.space.dim)
    return rref


def symplectic_multiplicity(a: RestrictionClass, fam: TangentFieldFamily) -> int:
    return a.space.dim - len(orbit_tangent_space(a, fam))


def apply_flow(a: RestrictionClass, m: ActionMatrix, t: Fraction) -> RestrictionClass:
    """exp(t L_X) a for a field acting nilpotently on the class."""
    powers = _orbit_powers(m, a.coords, a.space.dim + 1)
    if powers is None:
        raise RestrictionError(f"field {m.label} does not act nilpotently on {a}")
    coords = (
        sum((t**r / math.factorial(r) * v[i] for r, v in enumerate(powers)), Fraction(0)) for i in range(a.space.dim)
    )
    return RestrictionClass(a.space, tuple(coords))


def rescale(a: RestrictionClass, lam: Fraction) -> RestrictionClass:
    """Pullback by the weighted scaling x_i -> lam^(w_i) x_i: coordinate j picks up lam^(delta_j)."""
    if lam == 0:
        raise DimensionError("the scaling factor must be nonzero")
    return RestrictionClass(a.space, tuple(c * lam**d for c, d in zip(a.coords, a.space.degrees, strict=True)))


def index_of_isotropy(a: RestrictionClass) -> Order:
    """Maximal order of vanishing at 0 of a closed form representing the class."""
    if not a.space.closed:
        raise NotClosedError("the index of isotropy is defined on restrictions of closed forms")
    if a.is_zero():
        return INFINITY
    return min(_piece_isotropy(a.space, delta, part) for delta, part in a.graded_parts().items())


def _piece_isotropy(s: RestrictionSpace, delta: int, part: RestrictionClass) -> int:
    piece = s.pieces[delta]
    ncols = len(piece.forms)
    candidates = [piece.vector(b) for b in closed_form_generators(s.germ, s.form_degree, delta)]
    # Closed forms of this degree with zero restriction.
    zero_closed: list[list[Fraction]] = []
    if candidates:
        remainders = [reduce_vector(v, piece.zero_rows, piece.zero_pivots) for v in candidates]
        for y in nullspace(transpose(remainders, ncols), len(candidates)):
            combination = [Fraction(0)] * ncols
            for c, v in zip(y, candidates, strict=True):
                if c:
                    combination = [x + c * vi for x, vi in zip(combination, v, strict=True)]
            zero_closed.append(combination)
    target = piece.vector(part.form())
    orders = [sum(exps) for exps, _ in piece.forms]
    k = 0
    while True:
        constrained = [i for i, o in enumerate(orders) if o <= k]
        matrix = [[z[i] for z in zero_closed] for i in constrained]
        if solve(matrix, [-target[i] for i in constrained]) is None:
            return k
        k += 1


@dataclass(frozen=True)
class GuardAtom:
    indices: tuple[int, ...]
    nonzero: bool

    def holds(self, coords: Sequence[Fraction]) -> bool:
        return (math.prod(coords[i] for i in self.indices) != 0) == self.nonzero

    def __str__(self) -> str:
        product = "*".join(f"c{i + 1}" for i in self.indices)
        return f"{product}{'!=' if self.nonzero else '=='}0"


def parse_guard(text: str, dim: int) -> tuple[GuardAtom, ...]:
    if text == "zero":
        return tuple(GuardAtom((i,), False) for i in range(dim))
    atoms = []
    for chunk in text.split("&"):
        chunk = chunk.strip()
        if chunk.endswith("!=0"):
            product, nonzero = chunk[:-3], True
        elif chunk.endswith("==0"):
            product, nonzero = chunk[:-3], False
        else:
            raise RulesetError(f"guard atom {chunk!r} must end in '==0' or '!=0'")
        indices = []
        for factor in product.split("*"):
            factor = factor.strip()
            if not factor.startswith("c") or not factor[1:].isdigit():
                raise RulesetError(f"guard factor {factor!r} is not a coefficient name c<k>")
            index = int(factor[1:]) - 1
            if not 0 <= index < dim:
                raise RulesetError(f"guard factor {factor!r} out of range for dimension {dim}")
            indices.append(index)
        atoms.append(GuardAtom(tuple(indices), nonzero))
    return tuple(atoms)


@dataclass(frozen=True)
class ClassificationRule:
    """One decision rule. Indices are 0-based internally and 1-based in ruleset files."""

    guard_text: str
    guard: tuple[GuardAtom, ...]
    class_label: str
    pivot: int | None
    eliminate: tuple[int, ...]
    moduli: tuple[int, ...]
    sign_sensitive: bool

    def matches(self, coords: Sequence[Fraction]) -> bool:
        return all(atom.holds(coords) for atom in self.guard)

    @property
    def codimension(self) -> int:
        return sum(1 for atom in self.guard if not atom.nonzero)

    @property
    def is_zero_class(self) -> bool:
        return self.pivot is None


@dataclass(frozen=True)
class ClassificationRuleset:
    germ_name: str
    dim: int
    rules: tuple[ClassificationRule, ...]
    verified: bool = True
    source: str = "<generated>"

    def match(self, coords: Sequence[Fraction]) -> ClassificationRule:
        for rule in self.rules:
            if rule.matches(coords):
                return rule
        raise RulesetError(f"no rule of the {self.germ_name} ruleset matches coordinates {list(map(str, coords))}")

    def rule(self, class_label: str) -> ClassificationRule:
        for rule in self.rules:
            if rule.class_label == class_label:
                return rule
        raise RulesetError(f"ruleset {self.germ_name} has no class {class_label!r}")

    def validate(self, s: RestrictionSpace, fam: TangentFieldFamily) -> None:
        """Check the rules against the space and the family of symmetries.

        Every index is guarded to zero, the pivot, a modulus or eliminated; the pivot parity agrees with the sign
        flag; the first matching rule always has a nonzero pivot; each elimination has a witness at the pivot.
        """
        if self.dim != s.dim:
            raise RulesetError(f"ruleset for dimension {self.dim} applied to a space of dimension {s.dim}")
        for rule in self.rules:
            if rule.is_zero_class:
                continue
            zeroed = {atom.indices[0] for atom in rule.guard if not atom.nonzero and len(atom.indices) == 1}
            covered = zeroed | {rule.pivot} | set(rule.moduli) | set(rule.eliminate)
            if covered != set(range(self.dim)):
                missing = sorted(i + 1 for i in set(range(self.dim)) - covered)
                raise RulesetError(f"class {rule.class_label} leaves basis indices {missing} unaccounted for")
            if rule.sign_sensitive != (s.degrees[rule.pivot] % 2 == 0):
                raise RulesetError(
                    f"class {rule.class_label}: sign_sensitive must hold exactly for even pivot quasi-degree"
                )
        for mask in range(1 << self.dim):
            coords = [Fraction((mask >> i) & 1) for i in range(self.dim)]
            rule = self.match(coords)
            if not rule.is_zero_class and coords[rule.pivot] == 0:
                raise RulesetError(f"class {rule.class_label} selected with a zero pivot coefficient")
        for rule in self.rules:
            if rule.is_zero_class:
                continue
            nonzero = {i for atom in rule.guard if atom.nonzero for i in atom.indices}
            trial = [Fraction(int(i in nonzero)) for i in range(self.dim)]
            trial[rule.pivot] = Fraction(1)
            for k in rule.eliminate:
                frozen = _frozen_indices(s, k)
                if _elimination_witness(s, fam, trial, k, frozen) is None:
                    raise RulesetError(f"class {rule.class_label}: no field eliminates c{k + 1}")

    @classmethod
    def generic(cls, s: RestrictionSpace, fam: TangentFieldFamily) -> "ClassificationRuleset":
        """First-nonzero cascade: pivot i, everything eliminable at e_i is eliminated, the rest are moduli."""
        rules = []
        for i in range(s.dim):
            trial = [Fraction(int(j == i)) for j in range(s.dim)]
            eliminate, moduli = [], []
            for k in sorted(range(i + 1, s.dim), key=lambda k: (s.degrees[k], k)):
                if _elimination_witness(s, fam, trial, k, _frozen_indices(s, k)) is not None:
                    eliminate.append(k)
                else:
                    moduli.append(k)
            guard = "&".join([*(f"c{j + 1}==0" for j in range(i)), f"c{i + 1}!=0"])
            rules.append(
                ClassificationRule(
                    guard_text=guard,
                    guard=parse_guard(guard, s.dim),
                    class_label=f"{s.germ.name}^{i}",
                    pivot=i,
                    eliminate=tuple(eliminate),
                    moduli=tuple(sorted(moduli)),
                    sign_sensitive=s.degrees[i] % 2 == 0,
                )
            )
        rules.append(
            ClassificationRule("zero", parse_guard("zero", s.dim), f"{s.germ.name}^{s.dim}", None, (), (), False)
        )
        logger.warning(f"using the generic cascade for {s.germ.name}; its completeness is not verified")
        return cls(s.germ.name, s.dim, tuple(rules), verified=False)


def _indices(text: str, dim: int) -> tuple[int, ...]:
    if text in {"", "-"}:
        return ()
    indices = tuple(int(v) - 1 for v in text.split(","))
    if any(not 0 <= i < dim for i in indices):
        raise RulesetError(f"index list {text!r} out of range for dimension {dim}")
    return indices


def parse_ruleset(text: str, dim: int, germ_name: str = "", source: str = "<string>") -> ClassificationRuleset:
    """Parse `rule guard=... class=... pivot=... eliminate=... moduli=... sign_sensitive=...` lines."""
    rules = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "germ":
            germ_name = rest.strip()
            continue
        if key != "rule":
            raise RulesetError(f"line {number}: unknown key {key!r}")
        try:
            fields = dict(item.split("=", 1) for item in rest.split())
        except ValueError as e:
            raise RulesetError(f"line {number}: entries must be key=value pairs") from e
        unknown = set(fields) - {"guard", "class", "pivot", "eliminate", "moduli", "sign_sensitive"}
        if unknown or "guard" not in fields or "class" not in fields:
            raise RulesetError(f"line {number}: needs guard= and class=, unknown keys {sorted(unknown)}")
        pivot_text = fields.get("pivot", "-")
        pivot = None if pivot_text == "-" else _indices(pivot_text, dim)[0]
        if (pivot is None) != (fields["guard"] == "zero"):
            raise RulesetError(f"line {number}: exactly the zero class has no pivot")
        try:
            guard = parse_guard(fields["guard"], dim)
        except RulesetError as e:
            raise RulesetError(f"line {number}: {e}") from e
        rules.append(
            ClassificationRule(
                guard_text=fields["guard"],
                guard=guard,
                class_label=fields["class"],
                pivot=pivot,
                eliminate=_indices(fields.get("eliminate", "-"), dim),
                moduli=_indices(fields.get("moduli", "-"), dim),
                sign_sensitive=fields.get("sign_sensitive", "false").lower() == "true",
            )
        )
    if not rules:
        raise RulesetError(f"ruleset {source} has no rules")
    return ClassificationRuleset(germ_name, dim, tuple(rules), verified=True, source=source)


def load_ruleset(s: RestrictionSpace, fam: TangentFieldFamily, source: str | None = None) -> ClassificationRuleset:
    """The germ's shipped ruleset, a ruleset file, or the unverified generic cascade."""
    path = Path(source) if source else RULESETS_DIR / f"{s.germ.name}.rules"
    if not path.exists():
        if source:
            raise RulesetError(f"ruleset file {source} not found")
        return ClassificationRuleset.generic(s, fam)
    rules = parse_ruleset(path.read_text(encoding="utf-8"), s.dim, s.germ.name, str(path))
    rules.validate(s, fam)
    return rules


def _frozen_indices(s: RestrictionSpace, k: int) -> set[int]:
    return {j for j in range(s.dim) if j != k and s.degrees[j] <= s.degrees[k]}


def _orbit_powers(m: ActionMatrix, coords: Sequence[Fraction], limit: int) -> list[tuple[Fraction, ...]] | None:
    """[a, A a, A^2 a, ...] up to the first zero vector; None if A does not act nilpotently on a."""
    powers = [tuple(coords)]
    for _ in range(limit):
        nxt = m.apply(powers[-1])
        if not any(nxt):
            return powers
        powers.append(nxt)
    return None


def _elimination_witness(
    s: RestrictionSpace, fam: TangentFieldFamily, coords: Sequence[Fraction], k: int, frozen: set[int]
) -> tuple[FamilyField, list[tuple[Fraction, ...]]] | None:
    """First field of positive degree whose flow moves c_k linearly and leaves the frozen coordinates alone."""
    for f in fam.positive():
        m = action_matrix(s, f.field, f.label)
        powers = _orbit_powers(m, coords, s.dim + 1)
        if powers is None or len(powers) < 2 or powers[1][k] == 0:
            continue
        if any(v[k] for v in powers[2:]):
            continue
        if any(v[j] for v in powers[1:] for j in frozen):
            continue
        return f, powers
    return None


class EliminationStep(BaseModel):
    index: int = Field(description="1-based basis index of the eliminated coefficient.")
    field: str = Field(description="Label of the field whose flow was used.")
    parameter: RationalValue = Field(description="Time s of the flow exp(s*L_X).")


class Modulus(BaseModel):
    name: str = Field(description="Parameter name in the normal form (c, c1, c2).")
    index: int = Field(description="1-based basis index carrying the modulus.")
    coefficient: RationalValue = Field(description="Rational factor of the modulus value.")
    base: RationalValue = Field(description="Absolute value of the pivot coefficient before scaling.")
    exponent: RationalValue = Field(description="Exponent applied to the base.")
    exact: str = Field(description="Exact symbolic value.")
    decimal: str = Field(description="Decimal rendering of the value.")
    rational: bool = Field(description="Whether the value is rational.")

    def value(self) -> sympy.Expr:
        return sympy.sympify(self.exact)


class NormalFormReport(BaseModel):
    germ: str = Field(description="Germ name.")
    class_label: str = Field(description="Normal form class.")
    sign: str = Field(description="Sign of the pivot coefficient: '+', '-' or 'n/a'.")
    pivot: int | None = Field(default=None, description="1-based pivot index; None for the zero class.")
    moduli: list[Modulus] = Field(default_factory=list)
    normal_form: str = Field(description="Rendering of the normal form with the moduli values.")
    codimension: int
    symplectic_multiplicity: int
    index_of_isotropy: OrderValue
    min_symplectic_dim: int
    residual_coords: list[RationalValue] = Field(description="Coordinates after elimination, before scaling.")
    trace: list[EliminationStep] = Field(default_factory=list)
    ruleset_verified: bool = True


def classify(
    a: RestrictionClass, rules: ClassificationRuleset, fam: TangentFieldFamily | None = None
) -> NormalFormReport:
    """Bring a class to its normal form: match a rule, eliminate by unipotent flows, normalize by scaling."""
    s = a.space
    fam = fam if fam is not None else TangentFieldFamily.for_germ(s.germ, s)
    if rules.dim != s.dim:
        raise RulesetError(f"ruleset for dimension {rules.dim} applied to a space of dimension {s.dim}")
    rule = rules.match(a.coords)
    common = {
        "germ": s.germ.name,
        "class_label": rule.class_label,
        "codimension": s.dim if rule.is_zero_class else rule.codimension,
        "symplectic_multiplicity": symplectic_multiplicity(a, fam),
        "min_symplectic_dim": a.min_symplectic_dim(),
        "ruleset_verified": rules.verified,
    }
    if rule.is_zero_class:
        return NormalFormReport(
            **common,
            sign="n/a",
            normal_form="0",
            index_of_isotropy=INFINITY,
            residual_coords=list(a.coords),
        )

    coords = list(a.coords)
    trace = []
    for k in sorted(rule.eliminate, key=lambda k: (s.degrees[k], k)):
        witness = _elimination_witness(s, fam, coords, k, _frozen_indices(s, k))
        if witness is None:
            raise RulesetError(f"class {rule.class_label}: no field eliminates c{k + 1} at {list(map(str, coords))}")
        f, powers = witness
        if coords[k] == 0:
            continue
        t = -coords[k] / powers[1][k]
        coords = [
            sum((t**r / math.factorial(r) * v[i] for r, v in enumerate(powers)), Fraction(0)) for i in range(s.dim)
        ]
        trace.append(EliminationStep(index=k + 1, field=f.label, parameter=t))
        logger.debug(f"{rule.class_label}: eliminated c{k + 1} with {f.label} at s={t}")

    leftover = [i + 1 for i in range(s.dim) if coords[i] and i != rule.pivot and i not in rule.moduli]
    if leftover:
        raise RulesetError(f"class {rule.class_label}: coefficients {leftover} survived the eliminations")
    residual = RestrictionClass(s, tuple(coords))

    pivot_degree = s.degrees[rule.pivot]
    pivot_value = coords[rule.pivot]
    if pivot_degree % 2:
        reflection = 1 if pivot_value > 0 else -1
    else:
        reflection = 1
        first_odd = next((j for j in sorted(rule.moduli) if s.degrees[j] % 2 and coords[j]), None)
        if first_odd is not None and coords[first_odd] < 0:
            reflection = -1
    base = abs(pivot_value)
    names = ["c"] if len(rule.moduli) == 1 else [f"c{r + 1}" for r in range(len(rule.moduli))]
    moduli = []
    for name, j in zip(names, sorted(rule.moduli), strict=True):
        coefficient = coords[j] * reflection ** s.degrees[j]
        exponent = Fraction(-s.degrees[j], pivot_degree)
        value = sympy.Rational(coefficient.numerator, coefficient.denominator) * sympy.Rational(
            base.numerator, base.denominator
        ) ** sympy.Rational(exponent.numerator, exponent.denominator)
        moduli.append(
            Modulus(
                name=name,
                index=j + 1,
                coefficient=coefficient,
                base=base,
                exponent=exponent,
                exact=sympy.sstr(value),
                decimal=str(sympy.N(value, 12)),
                rational=bool(value.is_Rational),
            )
        )
    sign = ("+" if pivot_value > 0 else "-") if pivot_degree % 2 == 0 else "n/a"
    pieces = [("-" if sign == "-" else "") + s.labels[rule.pivot]]
    for m in moduli:
        pieces.append(f"({m.exact})*{s.labels[m.index - 1]}")
    return NormalFormReport(
        **common,
        sign=sign,
        pivot=rule.pivot + 1,
        moduli=moduli,
        normal_form=" + ".join(pieces),
        index_of_isotropy=index_of_isotropy(residual),
        residual_coords=coords,
        trace=trace,
    )


def sample_normal_form(s: RestrictionSpace, rule: ClassificationRule) -> RestrictionClass:
    """Representative of a class with pivot 1 and moduli 2, 3, ... in index order."""
    coords = [Fraction(0)] * s.dim
    if rule.pivot is not None:
        coords[rule.pivot] = Fraction(1)
        for value, j in enumerate(sorted(rule.moduli), start=2):
            coords[j] = Fraction(value)
    return s.element(coords)


def normal_form_class(s: RestrictionSpace, report: NormalFormReport) -> RestrictionClass:
    """The normal form of a report as a class; all moduli have to be rational."""
    coords = [Fraction(0)] * s.dim
    if report.pivot is None:
        return s.element(coords)
    coords[report.pivot - 1] = Fraction(-1 if report.sign == "-" else 1)
    for m in report.moduli:
        if not m.rational:
            raise RestrictionError(f"modulus {m.name} = {m.exact} of {report.class_label} is irrational")
        coords[m.index - 1] = Fraction(str(sympy.Rational(m.value())))
    return s.element(coords)


@dataclass(frozen=True)
class ModuliCertificate:
    class_label: str
    tangent_rank: int
    directions: tuple[str, ...]

    def describe(self) -> str:
        if not self.directions:
            return f"{self.class_label}: no moduli"
        return (
            f"{self.class_label}: {', '.join(self.directions)} independent of the rank {self.tangent_rank} "
            "orbit tangent space"
        )


def moduli_certificate(s: RestrictionSpace, report: NormalFormReport, fam: TangentFieldFamily) -> ModuliCertificate:
    """Check that the moduli directions are transversal to the orbit at the eliminated class.

    Raises:
        InvariantViolationError: a modulus direction lies in the span of the orbit tangent space.
    """
    residual = s.element(report.residual_coords)
    tangent = orbit_tangent_space(residual, fam)
    directions = [tuple(Fraction(int(i == m.index - 1)) for i in range(s.dim)) for m in report.moduli]
    if rank([*tangent, *directions]) != len(tangent) + len(directions):
        raise InvariantViolationError(
            f"moduli of {report.class_label} are not independent of the orbit tangent space at "
            f"{format_coordinates(residual.coords, s.labels)}"
        )
    return ModuliCertificate(report.class_label, len(tangent), tuple(s.labels[m.index - 1] for m in report.moduli))


def moser_system(
    a: RestrictionClass, fam: TangentFieldFamily, fields: Sequence[int], targets: Sequence[int]
) -> Matrix:
    """Coefficients of the target basis elements in L_X a for the chosen family fields.

    Rows follow `targets`, columns follow `fields` (0-based positions). The class can be moved along all target
    directions at once exactly when the matrix has full row rank.
    """
    chosen = [fam.generators[k] for k in fields]
    vectors = [action_matrix(a.space, f.field, f.label).apply(a.coords) for f in chosen]
    return [[v[t] for v in vectors] for t in targets]


def hamiltonian_field(g: GermDefinition) -> VectorField:
    """Cross product of the gradients of the two generators of a curve in three variables."""
    if g.nvars != 3 or len(g.generators) != 2:
        raise DimensionError("the Hamiltonian field is built for two generators in three variables")
    g1, g2 = g.generators
    d1 = [g1.derivative(i) for i in range(3)]
    d2 = [g2.derivative(i) for i in range(3)]
    return VectorField(d1[(i + 1) % 3] * d2[(i + 2) % 3] - d1[(i + 2) % 3] * d2[(i + 1) % 3] for i in range(3))

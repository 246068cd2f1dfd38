"""Quasi-homogeneous curve germs and their spaces of algebraic restrictions.

The space of algebraic restrictions of p-forms to N is computed degree by degree. In every quasi-degree the
forms vanishing on N in the algebraic sense are spanned by g*m*dx_I and d(g*m*dx_J) for the generators g of the
ideal, so each graded piece is a finite quotient handled with exact Gaussian elimination.
"""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
import itertools
from pathlib import Path

from loguru import logger

from symplectic_restrictions.errors import (
    DimensionError,
    GermParseError,
    NotClosedError,
    NotQuasiHomogeneousError,
    StabilizationError,
)
from symplectic_restrictions.exterior import (
    DiffForm,
    IndexTuple,
    VectorField,
    exterior_derivative,
    format_form,
)
from symplectic_restrictions.linalg import Row, rank, reduce_vector, row_reduce, solve, transpose
from symplectic_restrictions.parsing import parse_branch, parse_field, parse_form, parse_polynomial
from symplectic_restrictions.paths import GERMS_DIR
from symplectic_restrictions.qpoly import (
    BranchParam,
    Monomial,
    Polynomial,
    WeightSystem,
    as_fraction,
    format_polynomial,
    monomial_basis,
    quasi_degree,
    substitute_branch,
)

FormKey = tuple[Monomial, IndexTuple]


@dataclass(frozen=True)
class NamedForm:
    label: str
    form: DiffForm


@dataclass(frozen=True)
class NamedField:
    label: str
    text: str
    field: VectorField


@dataclass(frozen=True)
class GermDefinition:
    """A quasi-homogeneous curve germ given by generators of its ideal and parameterized branches."""

    name: str
    variables: tuple[str, ...]
    weights: WeightSystem
    generators: tuple[Polynomial, ...]
    branches: tuple[BranchParam, ...]
    symplectic_dim: int
    fields: tuple[NamedField, ...] = ()
    closed_representatives: tuple[NamedForm, ...] = ()
    all_representatives: tuple[NamedForm, ...] = ()
    frame_line: tuple[int, ...] | None = None
    frame_plane: tuple[int, ...] | None = None
    frame_space: tuple[int, ...] | None = None
    source: str = field(default="<memory>", compare=False)

    def __post_init__(self) -> None:
        n = len(self.variables)
        if len(self.weights) != n:
            raise DimensionError(f"germ {self.name}: {len(self.weights)} weights for {n} variables")
        if not self.branches:
            raise GermParseError(f"germ {self.name} needs at least one branch")
        if self.symplectic_dim % 2 or self.symplectic_dim < 2:
            raise GermParseError(f"germ {self.name}: symplectic_dim must be a positive even number")
        for g in self.generators:
            if g.is_zero():
                raise GermParseError(f"germ {self.name} has a zero generator")
            if g.nvars != n:
                raise DimensionError(f"generator {g} is not a polynomial in {n} variables")
            if not g.is_quasi_homogeneous(self.weights):
                raise NotQuasiHomogeneousError(
                    f"generator {format_polynomial(g, self.variables)} is not quasi-homogeneous "
                    f"for weights {self.weights.weights}"
                )
        for b in self.branches:
            if b.nvars != n:
                raise DimensionError(f"branch {b.label} has {b.nvars} components for {n} variables")
            for g in self.generators:
                if not substitute_branch(g, b).is_zero():
                    raise GermParseError(
                        f"generator {format_polynomial(g, self.variables)} does not vanish on branch {b.label}"
                    )

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def representatives(self, closed: bool) -> tuple[NamedForm, ...]:
        return self.closed_representatives if closed else self.all_representatives

    def format_polynomial(self, p: Polynomial) -> str:
        return format_polynomial(p, self.variables, self.weights)

    def format_form(self, a: DiffForm) -> str:
        return format_form(a, self.variables, self.weights)

    def parse_form(self, text: str, symbols: Mapping[str, DiffForm] | None = None) -> DiffForm:
        return parse_form(text, self.variables, symbols)

    def ideal_contains(self, p: Polynomial) -> bool:
        """Membership in the ideal generated by the generators, tested degree by degree."""
        for delta, part in p.graded_components(self.weights).items():
            monomials = monomial_basis(delta, self.weights)
            index = {m: i for i, m in enumerate(monomials)}
            rows = []
            for gen in self.generators:
                gdeg = quasi_degree(next(iter(gen.terms)), self.weights)
                for m in monomial_basis(delta - gdeg, self.weights):
                    row = [Fraction(0)] * len(monomials)
                    for exps, c in (gen * Polynomial.monomial(m)).terms.items():
                        row[index[exps]] += c
                    rows.append(row)
            target = [Fraction(0)] * len(monomials)
            for exps, c in part.terms.items():
                target[index[exps]] = c
            rref, pivots = row_reduce(rows, len(monomials))
            if any(reduce_vector(target, rref, pivots)):
                return False
        return True


_KEYS = {
    "germ",
    "variables",
    "weights",
    "symplectic_dim",
    "generator",
    "branch",
    "field",
    "representative",
    "line",
    "plane",
    "space",
}


def parse_germ(text: str, source: str = "<string>") -> GermDefinition:
    """Parse the line-oriented germ definition format.

    Args:
        text (str): File contents.
        source (str): Where the text came from, used in messages.

    Returns:
        GermDefinition: The validated germ.
    """
    entries: list[tuple[int, str, str]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key not in _KEYS:
            raise GermParseError(f"unknown key {key!r}", number)
        entries.append((number, key, rest.strip()))

    def single(key: str) -> tuple[int, str]:
        found = [(n, rest) for n, k, rest in entries if k == key]
        if not found:
            raise GermParseError(f"missing required key {key!r} in {source}")
        if len(found) > 1:
            raise GermParseError(f"key {key!r} given more than once", found[1][0])
        return found[0]

    _, name = single("germ")
    line_no, variables_text = single("variables")
    variables = tuple(variables_text.split())
    if len(set(variables)) != len(variables) or not variables:
        raise GermParseError("variables must be distinct and non-empty", line_no)
    line_no, weights_text = single("weights")
    try:
        weights = WeightSystem(weights=tuple(int(v) for v in weights_text.split()))
    except ValueError as e:
        raise GermParseError(f"invalid weights {weights_text!r}", line_no) from e
    symplectic_dim = 2 * len(variables)
    if any(k == "symplectic_dim" for _, k, _ in entries):
        line_no, dim_text = single("symplectic_dim")
        try:
            symplectic_dim = int(dim_text)
        except ValueError as e:
            raise GermParseError(f"invalid symplectic_dim {dim_text!r}", line_no) from e

    generators: list[Polynomial] = []
    branches: list[BranchParam] = []
    fields: list[NamedField] = []
    representatives: dict[str, list[NamedForm]] = {"closed": [], "all": []}
    frame: dict[str, tuple[int, ...]] = {}
    for number, key, rest in entries:
        try:
            if key == "generator":
                generator = parse_polynomial(rest, variables)
                if generator.is_zero():
                    raise GermParseError(f"generator {rest.strip()!r} is the zero polynomial")
                generators.append(generator)
            elif key == "branch":
                label, tuple_text = ("", rest) if rest.startswith("(") else rest.split(None, 1)
                branches.append(parse_branch(tuple_text, label or f"C{len(branches) + 1}", len(variables)))
            elif key == "field":
                label, field_text = rest.split(None, 1)
                fields.append(NamedField(label, field_text.strip(), parse_field(field_text, variables, weights)))
            elif key == "representative":
                variant, label, form_text = rest.split(None, 2)
                if variant not in representatives:
                    raise GermParseError(f"representative variant must be 'closed' or 'all', got {variant!r}")
                representatives[variant].append(NamedForm(label, parse_form(form_text, variables)))
            elif key in {"line", "plane", "space"}:
                unknown = [v for v in rest.split() if v not in variables]
                if unknown:
                    raise GermParseError(f"unknown frame variables {unknown}")
                frame[key] = tuple(sorted(variables.index(v) for v in rest.split()))
        except GermParseError as e:
            raise GermParseError(str(e), number) from e
        except ValueError as e:
            raise GermParseError(f"malformed {key!r} entry: {e}", number) from e

    if not generators:
        raise GermParseError(f"germ {name} has no generators")
    return GermDefinition(
        name=name,
        variables=variables,
        weights=weights,
        generators=tuple(generators),
        branches=tuple(branches),
        symplectic_dim=symplectic_dim,
        fields=tuple(fields),
        closed_representatives=tuple(representatives["closed"]),
        all_representatives=tuple(representatives["all"]),
        frame_line=frame.get("line"),
        frame_plane=frame.get("plane"),
        frame_space=frame.get("space"),
        source=source,
    )


def builtin_germs() -> list[str]:
    return sorted(path.stem for path in GERMS_DIR.glob("*.germ"))


@lru_cache(maxsize=32)
def load_germ(source: str) -> GermDefinition:
    """Load a built-in germ by name or a germ definition file by path."""
    builtin = GERMS_DIR / f"{source}.germ"
    path = builtin if builtin.exists() else Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise GermParseError(f"no built-in germ or file named {source!r}") from e
    return parse_germ(text, str(path))


def index_tuples(nvars: int, p: int) -> list[IndexTuple]:
    """Increasing index tuples of length p, with the ones built from later variables first."""
    return sorted(itertools.combinations(range(nvars), p), key=lambda t: tuple(-i for i in t))


def monomial_forms(w: WeightSystem, p: int, delta: int) -> list[FormKey]:
    """Monomial p-forms of quasi-degree delta in canonical order."""
    forms = []
    for indices in index_tuples(len(w), p):
        shift = sum(w[i] for i in indices)
        for exps in sorted(monomial_basis(delta - shift, w), key=lambda e: tuple(-x for x in e)):
            forms.append((exps, indices))
    return forms


def _vector(a: DiffForm, index: Mapping[FormKey, int]) -> Row:
    v = [Fraction(0)] * len(index)
    for exps, indices, c in a.monomial_terms():
        v[index[(exps, indices)]] += c
    return v


def _zero_generators(g: GermDefinition, p: int, delta: int) -> Iterable[DiffForm]:
    w = g.weights
    n = g.nvars
    for gen in g.generators:
        gdeg = quasi_degree(next(iter(gen.terms)), w)
        for indices in index_tuples(n, p):
            for exps in monomial_basis(delta - gdeg - sum(w[i] for i in indices), w):
                yield DiffForm({indices: gen * Polynomial.monomial(exps)}, p, n)
        for indices in index_tuples(n, p - 1):
            for exps in monomial_basis(delta - gdeg - sum(w[i] for i in indices), w):
                yield exterior_derivative(DiffForm({indices: gen * Polynomial.monomial(exps)}, p - 1, n))


def closed_form_generators(g: GermDefinition, p: int, delta: int) -> Iterable[DiffForm]:
    """Exact forms d(m*dx_J) of quasi-degree delta; they span the closed p-forms of that degree."""
    w = g.weights
    for indices in index_tuples(g.nvars, p - 1):
        for exps in monomial_basis(delta - sum(w[i] for i in indices), w):
            exact = exterior_derivative(DiffForm({indices: Polynomial.monomial(exps)}, p - 1, g.nvars))
            if not exact.is_zero():
                yield exact


def zero_restriction_subspace(g: GermDefinition, p: int, delta: int) -> list[Row]:
    """Reduced row basis of the forms of quasi-degree delta with zero algebraic restriction to the germ.

    Columns follow `monomial_forms(g.weights, p, delta)`.
    """
    forms = monomial_forms(g.weights, p, delta)
    index = {key: i for i, key in enumerate(forms)}
    rows = [_vector(a, index) for a in _zero_generators(g, p, delta)]
    rref, _ = row_reduce(rows, len(forms))
    return rref


@dataclass(frozen=True, eq=False)
class GradedPiece:
    degree: int
    forms: tuple[FormKey, ...]
    zero_rows: tuple[tuple[Fraction, ...], ...]
    zero_pivots: tuple[int, ...]
    # Dimension of the quotient of all p-forms, used by the stabilization rule.
    full_quotient_dim: int
    quotient_dim: int
    representatives: tuple[int, ...] = ()
    reduced_representatives: tuple[tuple[Fraction, ...], ...] = ()

    @cached_property
    def index(self) -> dict[FormKey, int]:
        return {key: i for i, key in enumerate(self.forms)}

    def vector(self, a: DiffForm) -> Row:
        return _vector(a, self.index)

    def remainder(self, a: DiffForm) -> Row:
        return reduce_vector(self.vector(a), self.zero_rows, self.zero_pivots)

    def coordinates(self, a: DiffForm) -> Row | None:
        """Coefficients over this piece's representatives, or None if the form is not in their span."""
        r = self.remainder(a)
        if not any(r):
            return [Fraction(0)] * len(self.representatives)
        if not self.representatives:
            return None
        return solve(transpose(self.reduced_representatives, len(self.forms)), r)


@dataclass(frozen=True)
class BasisElement:
    label: str
    form: DiffForm
    degree: int


@dataclass(frozen=True)
class StabilizationCertificate:
    cutoff: int
    pair_bound: int
    zero_run: int
    hard_cap: int

    def describe(self) -> str:
        return (
            f"quotient vanishes for {self.zero_run} consecutive degrees ending at {self.cutoff} "
            f"(past the weight bound {self.pair_bound}); all higher degrees vanish"
        )


@dataclass(frozen=True, eq=False)
class RestrictionSpace:
    germ: GermDefinition
    form_degree: int
    closed: bool
    pieces: Mapping[int, GradedPiece]
    basis: tuple[BasisElement, ...]
    certificate: StabilizationCertificate

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def cutoff(self) -> int:
        return self.certificate.cutoff

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(b.degree for b in self.basis)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.basis)

    def symbols(self) -> dict[str, DiffForm]:
        return {b.label: b.form for b in self.basis}

    def element(self, coords: Sequence[Fraction | int | str]) -> "RestrictionClass":
        return RestrictionClass(self, tuple(as_fraction(c) for c in coords))

    def unit(self, index: int) -> "RestrictionClass":
        return self.element([1 if i == index else 0 for i in range(self.dim)])

    def zero(self) -> "RestrictionClass":
        return self.element([0] * self.dim)

    def constant_indices(self) -> tuple[int, ...]:
        """Basis elements with a nonzero value at the origin."""
        return tuple(i for i, b in enumerate(self.basis) if b.form.value_at_origin())

    def parse(self, text: str) -> "RestrictionClass":
        return reduce_to_coordinates(self, self.germ.parse_form(text, self.symbols()))


@dataclass(frozen=True, eq=False)
class RestrictionClass:
    """Coordinates of an algebraic restriction over the basis of its space."""

    space: RestrictionSpace
    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.space.dim:
            raise DimensionError(f"{len(self.coords)} coordinates for a space of dimension {self.space.dim}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RestrictionClass):
            return NotImplemented
        return self.space is other.space and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((id(self.space), self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "RestrictionClass") -> "RestrictionClass":
        return RestrictionClass(self.space, tuple(a + b for a, b in zip(self.coords, other.coords, strict=True)))

    def __neg__(self) -> "RestrictionClass":
        return RestrictionClass(self.space, tuple(-a for a in self.coords))

    def __sub__(self, other: "RestrictionClass") -> "RestrictionClass":
        return self + (-other)

    def __mul__(self, scalar: Fraction | int) -> "RestrictionClass":
        return RestrictionClass(self.space, tuple(a * scalar for a in self.coords))

    __rmul__ = __mul__

    def form(self) -> DiffForm:
        result = DiffForm.zero(self.space.form_degree, self.space.germ.nvars)
        for c, b in zip(self.coords, self.space.basis, strict=True):
            if c:
                result = result + b.form * c
        return result

    def graded_parts(self) -> dict[int, "RestrictionClass"]:
        parts: dict[int, list[Fraction]] = {}
        for i, (c, delta) in enumerate(zip(self.coords, self.space.degrees, strict=True)):
            if c:
                parts.setdefault(delta, [Fraction(0)] * self.space.dim)[i] = c
        return {delta: RestrictionClass(self.space, tuple(v)) for delta, v in sorted(parts.items())}

    def min_symplectic_dim(self) -> int:
        """Smallest 2n such that the class is realized by a symplectic form on R^2n."""
        n = self.space.germ.nvars
        at_origin = [[Fraction(0)] * n for _ in range(n)]
        for c, b in zip(self.coords, self.space.basis, strict=True):
            for (i, j), value in b.form.value_at_origin().items():
                at_origin[i][j] += c * value
                at_origin[j][i] -= c * value
        return 2 * n - rank(at_origin)

    def realizable_in(self, symplectic_dim: int) -> bool:
        return symplectic_dim >= self.min_symplectic_dim()

    def __str__(self) -> str:
        return format_coordinates(self.coords, self.space.labels)


def format_coordinates(coords: Sequence[Fraction], labels: Sequence[str]) -> str:
    pieces = []
    for c, label in zip(coords, labels, strict=True):
        if not c:
            continue
        magnitude = abs(c)
        body = label if magnitude == 1 else f"{magnitude}*{label}"
        pieces.append(("-" if c < 0 else "+", body))
    if not pieces:
        return "0"
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def _greedy_independent(candidates: Sequence[Row], base_rows: Sequence[Row], ncols: int) -> list[int]:
    rref, pivots = row_reduce(base_rows, ncols)
    chosen = []
    for k, v in enumerate(candidates):
        if any(reduce_vector(v, rref, pivots)):
            chosen.append(k)
            rref, pivots = row_reduce([*rref, v], ncols)
    return chosen


def _build_piece(g: GermDefinition, p: int, closed: bool, delta: int) -> tuple[GradedPiece, list[DiffForm]]:
    """Compute one graded piece together with its canonical representatives."""
    forms = monomial_forms(g.weights, p, delta)
    index = {key: i for i, key in enumerate(forms)}
    zero_rows, zero_pivots = row_reduce([_vector(a, index) for a in _zero_generators(g, p, delta)], len(forms))
    full_dim = len(forms) - len(zero_pivots)
    if closed:
        candidates = list(closed_form_generators(g, p, delta))
    else:
        candidates = [DiffForm({indices: Polynomial.monomial(exps)}, p, g.nvars) for exps, indices in forms]
    chosen = _greedy_independent([_vector(a, index) for a in candidates], zero_rows, len(forms))
    piece = GradedPiece(
        degree=delta,
        forms=tuple(forms),
        zero_rows=tuple(tuple(r) for r in zero_rows),
        zero_pivots=tuple(zero_pivots),
        full_quotient_dim=full_dim,
        quotient_dim=len(chosen),
    )
    return piece, [candidates[k] for k in chosen]


@lru_cache(maxsize=64)
def restriction_basis(
    g: GermDefinition, p: int = 2, closed_only: bool = True, hard_cap: int | None = None
) -> RestrictionSpace:
    """Compute the graded space of algebraic restrictions of p-forms (or of closed p-forms) to the germ.

    Args:
        g (GermDefinition): The germ.
        p (int): Form degree, 1 or 2.
        closed_only (bool): Restrict to the image of closed forms.
        hard_cap (int | None): Largest quasi-degree examined before giving up; defaults to 10 times the weight sum.

    Returns:
        RestrictionSpace: Basis, graded pieces and stabilization certificate.
    """
    if p not in (1, 2):
        raise DimensionError(f"restriction spaces are computed for p in (1, 2), got {p}")
    w = g.weights
    pair_bound = sum(sorted(w.weights, reverse=True)[:p])
    required_run = max(w.weights)
    cap = hard_cap if hard_cap is not None else 10 * sum(w.weights)

    pieces: dict[int, GradedPiece] = {}
    canonical: dict[int, list[DiffForm]] = {}
    zero_run = 0
    delta = 0
    while True:
        if delta > cap:
            raise StabilizationError(
                f"restriction space of germ {g.name} did not stabilize below quasi-degree {cap}; "
                "raise the cutoff or check the generators"
            )
        piece, reps = _build_piece(g, p, closed_only, delta)
        pieces[delta] = piece
        canonical[delta] = reps
        if piece.quotient_dim or piece.full_quotient_dim:
            logger.debug(
                f"{g.name} p={p} delta={delta}: {len(piece.forms)} forms, quotient {piece.full_quotient_dim}, "
                f"closed image {piece.quotient_dim}"
            )
        zero_run = zero_run + 1 if piece.full_quotient_dim == 0 else 0
        if delta > pair_bound and zero_run >= required_run:
            break
        delta += 1
    certificate = StabilizationCertificate(cutoff=delta, pair_bound=pair_bound, zero_run=zero_run, hard_cap=cap)

    overrides = g.representatives(closed_only) if p == 2 else ()
    if overrides:
        chosen = _apply_overrides(g, closed_only, pieces, overrides)
    else:
        chosen = [
            BasisElement(f"theta{k + 1}", form, d)
            for k, (d, form) in enumerate((d, form) for d in sorted(canonical) for form in canonical[d])
        ]

    by_degree: dict[int, list[int]] = {}
    for position, element in enumerate(chosen):
        by_degree.setdefault(element.degree, []).append(position)
    final_pieces = {}
    for d, piece in pieces.items():
        positions = tuple(by_degree.get(d, ()))
        reduced = tuple(tuple(piece.remainder(chosen[i].form)) for i in positions)
        final_pieces[d] = GradedPiece(
            degree=piece.degree,
            forms=piece.forms,
            zero_rows=piece.zero_rows,
            zero_pivots=piece.zero_pivots,
            full_quotient_dim=piece.full_quotient_dim,
            quotient_dim=piece.quotient_dim,
            representatives=positions,
            reduced_representatives=reduced,
        )
    space = RestrictionSpace(
        germ=g,
        form_degree=p,
        closed=closed_only,
        pieces=final_pieces,
        basis=tuple(chosen),
        certificate=certificate,
    )
    logger.debug(f"{g.name}: restriction space p={p} closed={closed_only} has dimension {space.dim}")
    return space


def _apply_overrides(
    g: GermDefinition, closed: bool, pieces: Mapping[int, GradedPiece], overrides: Sequence[NamedForm]
) -> list[BasisElement]:
    elements = []
    for named in overrides:
        degrees = named.form.quasi_degrees(g.weights)
        if len(degrees) != 1:
            raise DimensionError(f"representative {named.label} of germ {g.name} is not quasi-homogeneous")
        if closed and not exterior_derivative(named.form).is_zero():
            raise NotClosedError(f"representative {named.label} of germ {g.name} is not closed")
        elements.append(BasisElement(named.label, named.form, degrees.pop()))
    elements.sort(key=lambda e: e.degree)
    for d, piece in pieces.items():
        listed = [e for e in elements if e.degree == d]
        if len(listed) != piece.quotient_dim:
            raise DimensionError(
                f"germ {g.name}: {len(listed)} listed representatives in quasi-degree {d} but the quotient "
                f"has dimension {piece.quotient_dim}"
            )
        if listed:
            remainders = [piece.remainder(e.form) for e in listed]
            if rank(remainders) != len(listed):
                raise DimensionError(f"germ {g.name}: listed representatives in quasi-degree {d} are dependent")
    stray = [e.label for e in elements if e.degree not in pieces]
    if stray:
        raise DimensionError(f"germ {g.name}: representatives {stray} lie beyond the stabilized range")
    return elements


def reduce_to_coordinates(s: RestrictionSpace, a: DiffForm) -> RestrictionClass:
    """Coordinates of the algebraic restriction of `a` over the basis of `s`."""
    if a.degree != s.form_degree:
        raise DimensionError(f"expected a {s.form_degree}-form, got a {a.degree}-form")
    if a.nvars != s.germ.nvars:
        raise DimensionError(f"form in {a.nvars} variables for a germ in {s.germ.nvars} variables")
    if s.closed and not exterior_derivative(a).is_zero():
        raise NotClosedError(f"form {s.germ.format_form(a)} is not closed")
    coords = [Fraction(0)] * s.dim
    for delta, part in a.graded_components(s.germ.weights).items():
        if delta > s.cutoff:
            continue
        piece = s.pieces[delta]
        values = piece.coordinates(part)
        if values is None:
            raise NotClosedError(
                f"quasi-degree {delta} part of {s.germ.format_form(a)} is not in the span of the representatives"
            )
        for position, value in zip(piece.representatives, values, strict=True):
            coords[position] += value
    return RestrictionClass(s, tuple(coords))

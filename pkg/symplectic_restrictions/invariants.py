"""Symplectic invariants of curve germs: Lagrangian tangency orders and geometric conditions.

Two routes compute the Lagrangian tangency order. The restriction route maximizes the vanishing order on the curve
of 1-forms whose differential represents the algebraic restriction of the symplectic form. The search route works
in Darboux coordinates and maximizes the tangency of the curve to Lagrangian submanifolds given by polynomial
generating functions.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
import itertools

from loguru import logger

from symplectic_restrictions.errors import (
    DegenerateFormError,
    DimensionError,
    FrameError,
    InvariantViolationError,
    NotClosedError,
    UnsupportedGermError,
)
from symplectic_restrictions.exterior import DiffForm, exterior_derivative
from symplectic_restrictions.germ import (
    GermDefinition,
    RestrictionClass,
    RestrictionSpace,
    index_tuples,
    reduce_to_coordinates,
)
from symplectic_restrictions.linalg import IncrementalSystem, determinant, nullspace, rank, reduce_vector, row_reduce
from symplectic_restrictions.qpoly import (
    INFINITY,
    BranchParam,
    Monomial,
    Order,
    Polynomial,
    TaylorSeries1D,
    WeightSystem,
    format_order,
    format_polynomial,
    monomial_basis,
    monomial_on_branch,
    substitute_branch,
    vanishing_order,
)


def darboux_names(n: int) -> tuple[str, ...]:
    """Chart coordinates (p1, q1, ..., pn, qn) of the standard form sum(dp_i ^ dq_i)."""
    return tuple(name for i in range(1, n + 1) for name in (f"p{i}", f"q{i}"))


def poisson_bracket(f: Polynomial, g: Polynomial) -> Polynomial:
    n = f.nvars // 2
    result = Polynomial.zero(f.nvars)
    for i in range(n):
        p, q = 2 * i, 2 * i + 1
        result = result + f.derivative(p) * g.derivative(q) - f.derivative(q) * g.derivative(p)
    return result


def _truncated_ideal_contains(target: Polynomial, generators: Sequence[Polynomial], jet: int) -> bool:
    """Whether `target` agrees with an element of the ideal up to total degree `jet`."""
    nvars = target.nvars
    monomials = [m for d in range(jet + 1) for m in monomial_basis(d, _unit_weights(nvars))]
    index = {m: i for i, m in enumerate(monomials)}

    def vector(p: Polynomial) -> list[Fraction]:
        v = [Fraction(0)] * len(monomials)
        for exps, c in p.terms.items():
            if sum(exps) <= jet:
                v[index[exps]] += c
        return v

    rows = [vector(h * Polynomial.monomial(m)) for h in generators for m in monomials if sum(m) < jet]
    rref, pivots = row_reduce(rows, len(monomials))
    return not any(reduce_vector(vector(target), rref, pivots))


@lru_cache(maxsize=8)
def _unit_weights(nvars: int) -> WeightSystem:
    return WeightSystem(weights=(1,) * nvars)


@dataclass(frozen=True)
class SubmanifoldEquations:
    """A smooth submanifold germ {H_1 = ... = H_n = 0} of the 2n-dimensional Darboux chart."""

    equations: tuple[Polynomial, ...]
    lagrangian: bool = False
    jet: int = 4

    def __post_init__(self) -> None:
        if not self.equations:
            raise DimensionError("a submanifold needs at least one equation")
        nvars = self.equations[0].nvars
        if any(h.nvars != nvars for h in self.equations):
            raise DimensionError("equations live in different numbers of variables")
        linear = [[h.derivative(j).constant_term() for j in range(nvars)] for h in self.equations]
        if rank(linear) != len(self.equations):
            raise DimensionError("the differentials of the equations are dependent at 0")
        if self.lagrangian and not self.check_lagrangian():
            raise InvariantViolationError("the equations do not define a Lagrangian submanifold")

    @property
    def nvars(self) -> int:
        return self.equations[0].nvars

    def check_lagrangian(self) -> bool:
        """Pairwise Poisson brackets vanish on {H = 0} up to the jet order."""
        if 2 * len(self.equations) != self.nvars:
            return False
        for f, g in itertools.combinations(self.equations, 2):
            if not _truncated_ideal_contains(poisson_bracket(f, g), self.equations, self.jet):
                return False
        return True

    def format(self) -> list[str]:
        names = darboux_names(self.nvars // 2) if self.nvars % 2 == 0 else [f"x{i + 1}" for i in range(self.nvars)]
        return [f"{format_polynomial(h, names)} = 0" for h in self.equations]


def tangency_order(b: BranchParam, S: SubmanifoldEquations) -> Order:
    """Minimum over the equations of the vanishing order of H_i along the branch."""
    if b.nvars != S.nvars:
        raise DimensionError(f"branch with {b.nvars} components against a submanifold in {S.nvars} variables")
    return min(vanishing_order(substitute_branch(h, b)) for h in S.equations)


def multigerm_tangency(bs: Sequence[BranchParam], S: SubmanifoldEquations) -> Order:
    if not bs:
        raise DimensionError("a multi-germ needs at least one branch")
    return min(tangency_order(b, S) for b in bs)


@dataclass(frozen=True)
class GeneratingFunctionFamily:
    """Lagrangian submanifolds built from a polynomial S in one variable of each Darboux pair.

    For a pair with p_i in the base the equation is q_i = dS/dp_i, otherwise p_i = -dS/dq_i.
    """

    n: int
    p_base: tuple[bool, ...]
    degree: int

    def __post_init__(self) -> None:
        if len(self.p_base) != self.n:
            raise DimensionError(f"split of length {len(self.p_base)} for {self.n} Darboux pairs")
        if self.degree < 1:
            raise DimensionError("the generating function degree must be positive")

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(2 * i if self.p_base[i] else 2 * i + 1 for i in range(self.n))

    @property
    def fibre(self) -> tuple[int, ...]:
        return tuple(2 * i + 1 if self.p_base[i] else 2 * i for i in range(self.n))

    def monomials(self) -> list[Monomial]:
        """Monomials in the base variables of degree 2..D."""
        weights = _unit_weights(self.n)
        return [m for d in range(2, self.degree + 1) for m in monomial_basis(d, weights)]

    def equations(self, coefficients: dict[Monomial, Fraction]) -> SubmanifoldEquations:
        nvars = 2 * self.n
        s = Polynomial(coefficients, self.n)
        base_vars = [Polynomial.variable(v, nvars) for v in self.base]
        hs = []
        for i in range(self.n):
            partial = s.derivative(i).compose(base_vars)
            fibre = Polynomial.variable(self.fibre[i], nvars)
            hs.append(fibre - partial if self.p_base[i] else fibre + partial)
        return SubmanifoldEquations(tuple(hs), lagrangian=True)

    def describe(self) -> str:
        return ",".join(("p" if b else "q") + str(i + 1) for i, b in enumerate(self.p_base))


@dataclass(frozen=True)
class TangencySearchResult:
    order: Order
    exact: bool
    maxed: bool
    bound: int
    family: GeneratingFunctionFamily | None = None
    witness: SubmanifoldEquations | None = None

    def render(self, text: bool = True) -> str:
        if self.maxed:
            return f">={self.bound}"
        return format_order(self.order, text)


def _split_search(
    branches: Sequence[BranchParam], fam: GeneratingFunctionFamily, bound: int
) -> TangencySearchResult:
    monomials = fam.monomials()
    base_branches = [BranchParam([b.components[v] for v in fam.base], b.label) for b in branches]
    # Per branch, equation index i and t-exponent: sparse row over the unknown coefficients.
    rows: dict[tuple[int, int, int], dict[int, Fraction]] = {}
    for col, m in enumerate(monomials):
        for i in range(fam.n):
            if not m[i]:
                continue
            lowered = tuple(e - (j == i) for j, e in enumerate(m))
            sign = -1 if fam.p_base[i] else 1
            for k, b in enumerate(base_branches):
                series = monomial_on_branch(lowered, b)
                for e, c in series.coefficients.items():
                    if e < bound:
                        row = rows.setdefault((k, i, e), {})
                        row[col] = row.get(col, 0) + sign * m[i] * c

    system = IncrementalSystem()
    for e in range(1, bound):
        for k, b in enumerate(branches):
            for i in range(fam.n):
                rhs = -b.components[fam.fibre[i]].coefficient(e)
                condition = system.add_equation(rows.get((k, i, e), {}), {0: rhs})
                if condition:
                    return TangencySearchResult(order=e, exact=False, maxed=False, bound=bound, family=fam)
    solution = system.solve({0: Fraction(1)}) or {}
    witness = fam.equations({monomials[col]: value for col, value in solution.items()})
    if all(multigerm_tangency([b], witness) == INFINITY for b in branches):
        return TangencySearchResult(order=INFINITY, exact=True, maxed=False, bound=bound, family=fam, witness=witness)
    return TangencySearchResult(order=bound, exact=False, maxed=True, bound=bound, family=fam, witness=witness)


def lagrangian_tangency_search(bs: Sequence[BranchParam], degree_cap: int = 20) -> TangencySearchResult:
    """Maximize min tangency of the branches to Lagrangian submanifolds over generating functions of degree <= D.

    The result is a certified lower bound. When every order up to D times the largest exponent of the branches is
    reached without an exact witness, the result is flagged as maxed.
    """
    if not bs:
        raise DimensionError("a multi-germ needs at least one branch")
    nvars = bs[0].nvars
    if nvars % 2 or any(b.nvars != nvars for b in bs):
        raise DimensionError("branches must live in the same even-dimensional Darboux chart")
    n = nvars // 2
    bound = degree_cap * max(max(b.max_exponent for b in bs), 1)
    best: TangencySearchResult | None = None
    for split in itertools.product((True, False), repeat=n):
        fam = GeneratingFunctionFamily(n, split, degree_cap)
        result = _split_search(bs, fam, bound)
        logger.debug(f"generating-function split {fam.describe()}: order {result.render(False)}")
        if result.exact:
            return result
        if best is None or (result.maxed, result.order) > (best.maxed, best.order):
            best = result
    if best.maxed:
        logger.warning(f"tangency search reached the bound {bound} without an exact witness")
    return best


@dataclass(frozen=True)
class _TangencyProfile:
    """Consistency conditions collected stage by stage: (stage, functional over restriction coordinates)."""

    conditions: tuple[tuple[int, tuple[Fraction, ...]], ...]


@lru_cache(maxsize=16)
def _tangency_profile(s: RestrictionSpace, branches: tuple[BranchParam, ...]) -> _TangencyProfile:
    g = s.germ
    if s.dim == 0:
        return _TangencyProfile(())
    # Unknowns are monomial 1-forms x^e dx_i; those above the cutoff have zero differential in the restriction space.
    unknowns: list[tuple[int, tuple[TaylorSeries1D, ...]]] = []
    images: list[tuple[Fraction, ...]] = []
    for delta in range(s.cutoff + max(g.weights.weights) + 1):
        for (i,) in index_tuples(g.nvars, 1):
            for exps in monomial_basis(delta - g.weights[i], g.weights):
                unknowns.append((i, tuple(monomial_on_branch(exps, b) for b in branches)))
                images.append(reduce_to_coordinates(s, exterior_derivative(DiffForm.monomial_form(exps, (i,)))).coords)
    system = IncrementalSystem()
    for j in range(s.dim):
        if system.add_equation({c: v[j] for c, v in enumerate(images) if v[j]}, {j: Fraction(1)}):
            raise InvariantViolationError("a closed restriction class is not the differential of a 1-form")
    last_stage = max((o for _, series in unknowns for o in map(vanishing_order, series) if o != INFINITY), default=0)
    conditions: list[tuple[int, tuple[Fraction, ...]]] = []
    for stage in range(1, int(last_stage) + 2):
        for k in range(len(branches)):
            for i in range(g.nvars):
                row = {
                    col: series[k].coefficient(stage - 1)
                    for col, (index, series) in enumerate(unknowns)
                    if index == i and series[k].coefficient(stage - 1)
                }
                condition = system.add_equation(row, {})
                if condition:
                    conditions.append((stage, tuple(condition.get(j, Fraction(0)) for j in range(s.dim))))
        if conditions and rank([v for _, v in conditions]) == s.dim:
            logger.debug(f"tangency profile for {g.name} reaches full rank at stage {stage}")
            return _TangencyProfile(tuple(conditions))
    raise InvariantViolationError(
        f"tangency conditions for {g.name} do not separate the restriction classes; the ideal generated by the "
        "listed equations may be smaller than the ideal of the curve"
    )


def lagrangian_tangency_single(a: RestrictionClass, experimental_multibranch: bool = False) -> Order:
    """Largest vanishing order on the curve of a 1-form alpha with [d alpha] = a; INFINITY iff a = 0.

    The vanishing order of a 1-form on a branch is the least vanishing order of its coefficient functions.
    """
    s = a.space
    if not s.closed or s.form_degree != 2:
        raise NotClosedError("Lagrangian tangency is computed on restrictions of closed 2-forms")
    if len(s.germ.branches) > 1 and not experimental_multibranch:
        raise UnsupportedGermError(
            f"germ {s.germ.name} has {len(s.germ.branches)} branches; use the generating-function search"
        )
    profile = _tangency_profile(s, s.germ.branches)
    result: Order = INFINITY
    for stage, functional in profile.conditions:
        if sum((f * c for f, c in zip(functional, a.coords, strict=True)), Fraction(0)):
            result = min(result, stage - 1)
    return result


@dataclass(frozen=True)
class TangentFrame:
    """Coordinate spans at 0: the tangent line, the 2-plane and the 3-space of a curve germ."""

    line: tuple[int, ...]
    plane: tuple[int, ...]
    space: tuple[int, ...]

    def __post_init__(self) -> None:
        if not set(self.line) <= set(self.plane) or not set(self.plane) <= set(self.space):
            raise FrameError(f"frame is not nested: line {self.line}, plane {self.plane}, space {self.space}")

    @classmethod
    def for_germ(cls, g: GermDefinition) -> "TangentFrame":
        """The germ's listed frame, or one read off the lowest-order terms of its most singular branch."""
        if g.frame_line and g.frame_plane and g.frame_space:
            return cls(g.frame_line, g.frame_plane, g.frame_space)
        branch = max(g.branches, key=lambda b: min(b.component_orders()))
        ranked = sorted((o, i) for i, o in enumerate(branch.component_orders()) if o != INFINITY)
        if len(ranked) < 2:
            raise FrameError(f"cannot derive a tangent frame for germ {g.name}")
        return cls((ranked[0][1],), tuple(sorted(i for _, i in ranked[:2])), tuple(range(g.nvars)))


class GeometricCondition(str, Enum):
    OMEGA_V_NONZERO = "omega|V != 0"
    KER_NOT_LINE = "omega|V = 0, ker != l"
    KER_IS_LINE = "omega|V = 0, ker = l"
    OMEGA_W_ZERO = "omega|W = 0"
    LAGRANGIAN = "lagrangian"

    @property
    def text(self) -> str:
        return {
            "omega|V != 0": "ω|_V ≠ 0",
            "omega|V = 0, ker != l": "ω|_V = 0 and ker ω ≠ ℓ",
            "omega|V = 0, ker = l": "ω|_V = 0 and ker ω = ℓ",
            "omega|W = 0": "ω|_W = 0",
            "lagrangian": "contained in a smooth Lagrangian submanifold",
        }[self.value]


@dataclass(frozen=True)
class GeometricReport:
    condition: GeometricCondition
    lagrangian_order: Order | None = None
    experimental: bool = False
    searched: bool = False
    restriction: tuple[Fraction, ...] = field(default=())

    def render(self, text: bool = True) -> str:
        label = self.condition.text if text else self.condition.value
        if self.lagrangian_order is None or self.condition is GeometricCondition.LAGRANGIAN:
            return label
        return f"{label}, L_N={format_order(self.lagrangian_order, text)}"


def _matrix_at_origin(omega: DiffForm) -> list[list[Fraction]]:
    n = omega.nvars
    m = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), value in omega.value_at_origin().items():
        m[i][j] += value
        m[j][i] -= value
    return m


def geometric_class(
    s: RestrictionSpace, omega: DiffForm, frame: TangentFrame, experimental_multibranch: bool = False
) -> GeometricReport:
    """First geometric condition satisfied by (germ, omega), with L_N when omega vanishes on W.

    For a multi-branch germ L_N is left as None for the chart-curve search, unless experimental_multibranch
    asks for the 1-form route; such reports are marked experimental.

    Raises:
        NotClosedError: omega is not closed.
        DegenerateFormError: omega is degenerate at 0.
    """
    g = s.germ
    if omega.degree != 2:
        raise DimensionError(f"expected a 2-form, got a {omega.degree}-form")
    if omega.nvars % 2 or omega.nvars < g.nvars:
        raise DimensionError(f"symplectic form in {omega.nvars} variables for a germ in {g.nvars} variables")
    if not exterior_derivative(omega).is_zero():
        raise NotClosedError("the symplectic form is not closed")
    m = _matrix_at_origin(omega)
    if determinant(m) == 0:
        raise DegenerateFormError("the form is degenerate at 0")
    if any(m[i][j] for i in frame.plane for j in frame.plane):
        return GeometricReport(GeometricCondition.OMEGA_V_NONZERO)
    on_space = [[m[i][j] for j in frame.space] for i in frame.space]
    if any(any(row) for row in on_space):
        kernel = nullspace(on_space, len(frame.space))
        line = [Fraction(int(i in frame.line)) for i in frame.space]
        same = len(kernel) == len(frame.line) and rank([*kernel, line]) == len(kernel)
        return GeometricReport(GeometricCondition.KER_IS_LINE if same else GeometricCondition.KER_NOT_LINE)

    restricted = omega.restrict(g.nvars)
    a = reduce_to_coordinates(s, restricted)
    if a.is_zero():
        return GeometricReport(GeometricCondition.LAGRANGIAN, INFINITY, restriction=a.coords)
    multibranch = len(g.branches) > 1
    if multibranch and not experimental_multibranch:
        return GeometricReport(GeometricCondition.OMEGA_W_ZERO, restriction=a.coords)
    if multibranch:
        logger.warning(f"L_N for the multi-branch germ {g.name} uses the experimental 1-form route")
    order = lagrangian_tangency_single(a, experimental_multibranch=multibranch)
    return GeometricReport(GeometricCondition.OMEGA_W_ZERO, order, experimental=multibranch, restriction=a.coords)


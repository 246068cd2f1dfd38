"""Differential forms and vector fields with polynomial coefficients."""

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
import itertools

from immutabledict import immutabledict

from symplectic_restrictions.errors import DimensionError
from symplectic_restrictions.qpoly import (
    INFINITY,
    BranchParam,
    Order,
    Polynomial,
    Scalar,
    TaylorSeries1D,
    WeightSystem,
    format_polynomial,
    quasi_degree,
    substitute_branch,
    vanishing_order,
)

IndexTuple = tuple[int, ...]

# Forms above this degree never show up in the restriction computations.
MAX_FORM_DEGREE = 3


def _normalize(indices: Sequence[int]) -> tuple[int, IndexTuple]:
    """Sort a wedge of differentials, returning the permutation sign (0 on a repeated index)."""
    if len(set(indices)) != len(indices):
        return 0, ()
    sign = 1
    items = list(indices)
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, tuple(items)


class DiffForm:
    """A p-form sum(f_I dx_I) with strictly increasing index tuples I."""

    __slots__ = ("_hash", "degree", "nvars", "terms")

    def __init__(self, terms: Mapping[IndexTuple, Polynomial], degree: int, nvars: int) -> None:
        if degree > MAX_FORM_DEGREE:
            raise DimensionError(f"forms of degree {degree} are not supported")
        collected: dict[IndexTuple, Polynomial] = {}
        for indices, coeff in terms.items():
            if len(indices) != degree:
                raise DimensionError(f"index tuple {indices} does not match form degree {degree}")
            if any(i < 0 or i >= nvars for i in indices):
                raise DimensionError(f"index tuple {indices} out of range for {nvars} variables")
            if coeff.nvars != nvars:
                raise DimensionError(f"coefficient in {coeff.nvars} variables for a form in {nvars} variables")
            sign, key = _normalize(indices)
            if sign == 0:
                continue
            collected[key] = collected.get(key, Polynomial.zero(nvars)) + coeff * sign
        self.degree = degree
        self.nvars = nvars
        self.terms: immutabledict[IndexTuple, Polynomial] = immutabledict(
            sorted((k, v) for k, v in collected.items() if not v.is_zero())
        )
        self._hash: int | None = None

    @classmethod
    def zero(cls, degree: int, nvars: int) -> "DiffForm":
        return cls({}, degree, nvars)

    @classmethod
    def function(cls, f: Polynomial) -> "DiffForm":
        return cls({(): f}, 0, f.nvars)

    @classmethod
    def dx(cls, index: int, nvars: int) -> "DiffForm":
        return cls({(index,): Polynomial.constant(1, nvars)}, 1, nvars)

    @classmethod
    def monomial_form(cls, exps: Sequence[int], indices: IndexTuple, coeff: Scalar = 1) -> "DiffForm":
        return cls({indices: Polynomial.monomial(tuple(exps), coeff)}, len(indices), len(exps))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffForm):
            return NotImplemented
        return (self.degree, self.nvars, self.terms) == (other.degree, other.nvars, other.terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.degree, self.nvars, tuple(self.terms.items())))
        return self._hash

    def _check(self, other: "DiffForm") -> None:
        if (self.degree, self.nvars) != (other.degree, other.nvars):
            raise DimensionError(
                f"cannot add a {other.degree}-form in {other.nvars} variables to a {self.degree}-form in {self.nvars}"
            )

    def __add__(self, other: "DiffForm") -> "DiffForm":
        self._check(other)
        merged = dict(self.terms)
        for k, v in other.terms.items():
            merged[k] = merged[k] + v if k in merged else v
        return DiffForm(merged, self.degree, self.nvars)

    def __neg__(self) -> "DiffForm":
        return DiffForm({k: -v for k, v in self.terms.items()}, self.degree, self.nvars)

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self + (-other)

    def __mul__(self, other: Polynomial | Scalar) -> "DiffForm":
        return DiffForm({k: v * other for k, v in self.terms.items()}, self.degree, self.nvars)

    __rmul__ = __mul__

    def monomial_terms(self) -> Iterable[tuple[tuple[int, ...], IndexTuple, Fraction]]:
        """Yield (exponents, indices, coefficient) for every monomial form in the sum."""
        for indices, coeff in self.terms.items():
            for exps, c in coeff.terms.items():
                yield exps, indices, c

    def quasi_degrees(self, w: WeightSystem) -> set[int]:
        return {form_quasi_degree(exps, indices, w) for exps, indices, _ in self.monomial_terms()}

    def is_quasi_homogeneous(self, w: WeightSystem) -> bool:
        return len(self.quasi_degrees(w)) <= 1

    def graded_components(self, w: WeightSystem) -> dict[int, "DiffForm"]:
        pieces: dict[int, dict[IndexTuple, dict[tuple[int, ...], Fraction]]] = {}
        for exps, indices, c in self.monomial_terms():
            delta = form_quasi_degree(exps, indices, w)
            pieces.setdefault(delta, {}).setdefault(indices, {})[exps] = c
        return {
            delta: DiffForm({k: Polynomial(t, self.nvars) for k, t in terms.items()}, self.degree, self.nvars)
            for delta, terms in sorted(pieces.items())
        }

    def restrict(self, nvars: int) -> "DiffForm":
        """Pull back to the coordinate subspace spanned by the first `nvars` variables."""
        kept = {k: v.restrict(nvars) for k, v in self.terms.items() if all(i < nvars for i in k)}
        return DiffForm(kept, self.degree, nvars)

    def extend(self, nvars: int) -> "DiffForm":
        return DiffForm({k: v.extend(nvars) for k, v in self.terms.items()}, self.degree, nvars)

    def value_at_origin(self) -> dict[IndexTuple, Fraction]:
        return {k: v.constant_term() for k, v in self.terms.items() if v.constant_term() != 0}

    def __str__(self) -> str:
        return format_form(self, [f"x{i + 1}" for i in range(self.nvars)])

    def __repr__(self) -> str:
        return f"DiffForm({self})"


def form_quasi_degree(exps: Sequence[int], indices: IndexTuple, w: WeightSystem) -> int:
    """Quasi-degree of the coefficient monomial plus the weights of the wedged differentials."""
    return quasi_degree(tuple(exps), w) + sum(w[i] for i in indices)


def format_form(a: DiffForm, names: Sequence[str], w: WeightSystem | None = None) -> str:
    if a.is_zero():
        return "0"
    if a.degree == 0:
        return format_polynomial(a.terms[()], names, w)

    def key(item: tuple[IndexTuple, Polynomial]) -> tuple:
        indices, coeff = item
        grade = min(
            (form_quasi_degree(exps, indices, w) if w is not None else sum(exps)) for exps in coeff.terms
        )
        return (grade, indices)

    pieces = []
    for indices, coeff in sorted(a.terms.items(), key=key):
        wedge_text = "^".join(f"d{names[i]}" for i in indices)
        if len(coeff.terms) == 1:
            text = format_polynomial(coeff, names, w)
            negative = text.startswith("-")
            text = text.lstrip("-")
            body = wedge_text if text == "1" else f"{text}*{wedge_text}"
        else:
            negative = False
            body = f"({format_polynomial(coeff, names, w)})*{wedge_text}"
        pieces.append(("-" if negative else "+", body))
    first_sign, first_body = pieces[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


class VectorField:
    """Polynomial vector field sum(X_i d/dx_i)."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Polynomial]) -> None:
        self.components: tuple[Polynomial, ...] = tuple(components)
        if len({c.nvars for c in self.components}) > 1:
            raise DimensionError("vector field components live in different numbers of variables")
        if self.components and self.components[0].nvars != len(self.components):
            raise DimensionError("component count must equal the ambient dimension")

    @property
    def nvars(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, nvars: int) -> "VectorField":
        return cls([Polynomial.zero(nvars)] * nvars)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(a + b for a, b in zip(self.components, other.components, strict=True))

    def __mul__(self, other: Polynomial | Scalar) -> "VectorField":
        return VectorField(c * other for c in self.components)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def apply(self, f: Polynomial) -> Polynomial:
        """Derivative of f along the field."""
        result = Polynomial.zero(self.nvars)
        for i, comp in enumerate(self.components):
            if not comp.is_zero():
                result = result + comp * f.derivative(i)
        return result

    def quasi_degrees(self, w: WeightSystem) -> set[int]:
        degrees = set()
        for i, comp in enumerate(self.components):
            degrees.update(d - w[i] for d in comp.quasi_degrees(w))
        return degrees

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"

    def __repr__(self) -> str:
        return f"VectorField{self}"


def euler_field(w: WeightSystem) -> VectorField:
    n = len(w)
    return VectorField(Polynomial.variable(i, n) * w[i] for i in range(n))


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    if a.nvars != b.nvars:
        raise DimensionError("forms live in different numbers of variables")
    degree = a.degree + b.degree
    if degree > MAX_FORM_DEGREE:
        raise DimensionError(f"wedge of degree {degree} exceeds the supported maximum {MAX_FORM_DEGREE}")
    terms: dict[IndexTuple, Polynomial] = {}
    for ia, fa in a.terms.items():
        for ib, fb in b.terms.items():
            sign, key = _normalize(ia + ib)
            if sign == 0:
                continue
            product = fa * fb * sign
            terms[key] = terms[key] + product if key in terms else product
    return DiffForm(terms, degree, a.nvars)


def exterior_derivative(a: DiffForm) -> DiffForm:
    if a.degree >= MAX_FORM_DEGREE:
        raise DimensionError("exterior derivative of a top-degree form is not supported")
    terms: dict[IndexTuple, Polynomial] = {}
    for indices, f in a.terms.items():
        for j in range(a.nvars):
            df = f.derivative(j)
            if df.is_zero():
                continue
            sign, key = _normalize((j, *indices))
            if sign == 0:
                continue
            terms[key] = terms[key] + df * sign if key in terms else df * sign
    return DiffForm(terms, a.degree + 1, a.nvars)


def interior_product(X: VectorField, a: DiffForm) -> DiffForm:
    if a.degree == 0:
        raise DimensionError("interior product of a function is undefined")
    if X.nvars != a.nvars:
        raise DimensionError("field and form live in different numbers of variables")
    terms: dict[IndexTuple, Polynomial] = {}
    for indices, f in a.terms.items():
        for r, i in enumerate(indices):
            comp = X.components[i]
            if comp.is_zero():
                continue
            rest = indices[:r] + indices[r + 1 :]
            value = comp * f * (-1) ** r
            terms[rest] = terms[rest] + value if rest in terms else value
    return DiffForm(terms, a.degree - 1, a.nvars)


def lie_derivative(X: VectorField, a: DiffForm) -> DiffForm:
    """L_X a = d(i_X a) + i_X(da)."""
    if a.degree == 0:
        return DiffForm.function(X.apply(a.terms.get((), Polynomial.zero(a.nvars))))
    result = exterior_derivative(interior_product(X, a))
    if a.degree < MAX_FORM_DEGREE:
        da = exterior_derivative(a)
        if not da.is_zero():
            result = result + interior_product(X, da)
    return result


def coefficient_orders_on_branch(a: DiffForm, b: BranchParam) -> Order:
    """Minimum vanishing order of the coefficient functions of `a` along the branch."""
    orders = [vanishing_order(substitute_branch(f, b)) for f in a.terms.values()]
    return min(orders, default=INFINITY)


def pullback(a: DiffForm, b: BranchParam) -> TaylorSeries1D:
    """Coefficient of (dt)^p in the pullback of a p-form along the branch."""
    velocities = [comp.derivative() for comp in b.components]
    result = TaylorSeries1D()
    for indices, f in a.terms.items():
        coeff = substitute_branch(f, b)
        # Determinant of the p x p matrix whose columns are all the velocity of the branch.
        det = TaylorSeries1D()
        for perm in itertools.permutations(range(len(indices))):
            sign, _ = _normalize(perm)
            product = TaylorSeries1D({0: sign})
            for r in perm:
                product = product * velocities[indices[r]]
            det = det + product
        result = result + coeff * det
    return result

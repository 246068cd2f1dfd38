"""Exact polynomial arithmetic over the rationals with a quasi-homogeneous grading.

Polynomials are sparse maps from exponent tuples to Fractions. Curves are given by polynomial parameterizations
in one variable `t`, carried as `TaylorSeries1D` components of a `BranchParam`.
"""

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from functools import lru_cache
import math
from typing import Annotated

from immutabledict import immutabledict
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, PositiveInt

from symplectic_restrictions.errors import DimensionError

INFINITY = math.inf

Monomial = tuple[int, ...]
Scalar = int | Fraction
# Orders of vanishing are non-negative integers or INFINITY.
Order = int | float


def as_fraction(value: Scalar | str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def format_order(o: Order, text: bool = False) -> str:
    """Render an order; INFINITY is `∞` in text output and `inf` in machine formats."""
    if o == INFINITY:
        return "∞" if text else "inf"
    return str(int(o))


def parse_order(value: Order | str) -> Order:
    if isinstance(value, str):
        value = value.strip()
        if value in {"inf", "∞", "Infinity"}:
            return INFINITY
        return int(value)
    return INFINITY if value == INFINITY else int(value)


# Exact rationals and orders inside pydantic models, serialized as strings.
RationalValue = Annotated[Fraction, PlainValidator(as_fraction), PlainSerializer(str, return_type=str)]
OrderValue = Annotated[Order, PlainValidator(parse_order), PlainSerializer(format_order, return_type=str)]


class WeightSystem(BaseModel):
    """Positive integer weights, one per ambient variable."""

    model_config = ConfigDict(frozen=True)

    weights: tuple[PositiveInt, ...] = Field(description="Quasi-degree of each coordinate variable.")

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, index: int) -> int:
        return self.weights[index]


def quasi_degree(m: Monomial, w: WeightSystem) -> int:
    """Weighted degree of a monomial.

    Args:
        m (Monomial): Exponent tuple.
        w (WeightSystem): Weights of the ambient variables.

    Returns:
        int: Sum of exponents times weights.
    """
    if len(m) != len(w):
        raise DimensionError(f"monomial has {len(m)} exponents but the weight system has {len(w)} weights")
    return sum(e * wi for e, wi in zip(m, w.weights, strict=True))


@lru_cache(maxsize=4096)
def _monomials_of_degree(delta: int, weights: tuple[int, ...]) -> tuple[Monomial, ...]:
    if not weights:
        return ((),) if delta == 0 else ()
    head, rest = weights[0], weights[1:]
    found = []
    for e in range(delta // head + 1):
        for tail in _monomials_of_degree(delta - e * head, rest):
            found.append((e, *tail))
    return tuple(sorted(found))


def monomial_basis(delta: int, w: WeightSystem) -> list[Monomial]:
    """All monomials of quasi-degree `delta` in canonical (lexicographic exponent) order."""
    if delta < 0:
        return []
    return list(_monomials_of_degree(delta, w.weights))


class Polynomial:
    """Sparse multivariate polynomial with rational coefficients."""

    __slots__ = ("_hash", "nvars", "terms")

    def __init__(self, terms: Mapping[Monomial, Scalar], nvars: int) -> None:
        cleaned: dict[Monomial, Fraction] = {}
        for exps, coeff in terms.items():
            if len(exps) != nvars:
                raise DimensionError(f"exponent tuple {exps} does not have {nvars} entries")
            c = as_fraction(coeff)
            if c != 0:
                cleaned[tuple(exps)] = c
        self.nvars = nvars
        self.terms: immutabledict[Monomial, Fraction] = immutabledict(sorted(cleaned.items()))
        self._hash: int | None = None

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls({}, nvars)

    @classmethod
    def constant(cls, value: Scalar, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: value}, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Polynomial":
        exps = [0] * nvars
        exps[index] = 1
        return cls({tuple(exps): 1}, nvars)

    @classmethod
    def monomial(cls, exps: Monomial, coeff: Scalar = 1) -> "Polynomial":
        return cls({tuple(exps): coeff}, len(exps))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int | Fraction):
            other = Polynomial.constant(other, self.nvars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self.terms.items())))
        return self._hash

    def _coerce(self, other: "Polynomial | Scalar") -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError(f"cannot combine polynomials in {self.nvars} and {other.nvars} variables")
            return other
        return Polynomial.constant(other, self.nvars)

    def __add__(self, other: "Polynomial | Scalar") -> "Polynomial":
        other = self._coerce(other)
        result = dict(self.terms)
        for exps, c in other.terms.items():
            result[exps] = result.get(exps, 0) + c
        return Polynomial(result, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({exps: -c for exps, c in self.terms.items()}, self.nvars)

    def __sub__(self, other: "Polynomial | Scalar") -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other: "Polynomial | Scalar") -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = as_fraction(other)
            return Polynomial({exps: c * v for exps, v in self.terms.items()}, self.nvars)
        other = self._coerce(other)
        result: dict[Monomial, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2, strict=True))
                result[exps] = result.get(exps, 0) + c1 * c2
        return Polynomial(result, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(1, self.nvars)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def derivative(self, index: int) -> "Polynomial":
        result: dict[Monomial, Fraction] = {}
        for exps, c in self.terms.items():
            e = exps[index]
            if e:
                lowered = list(exps)
                lowered[index] = e - 1
                result[tuple(lowered)] = c * e
        return Polynomial(result, self.nvars)

    def compose(self, components: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute polynomial components for the variables."""
        if len(components) != self.nvars:
            raise DimensionError(f"need {self.nvars} components, got {len(components)}")
        if not components:
            return self
        target = components[0].nvars
        result = Polynomial.zero(target)
        for exps, c in self.terms.items():
            term = Polynomial.constant(c, target)
            for comp, e in zip(components, exps, strict=True):
                if e:
                    term = term * comp**e
            result = result + term
        return result

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def order(self) -> Order:
        """Ordinary order of vanishing at the origin (lowest total degree)."""
        if not self.terms:
            return INFINITY
        return min(sum(exps) for exps in self.terms)

    def quasi_degrees(self, w: WeightSystem) -> set[int]:
        return {quasi_degree(exps, w) for exps in self.terms}

    def is_quasi_homogeneous(self, w: WeightSystem) -> bool:
        return len(self.quasi_degrees(w)) <= 1

    def graded_components(self, w: WeightSystem) -> dict[int, "Polynomial"]:
        pieces: dict[int, dict[Monomial, Fraction]] = {}
        for exps, c in self.terms.items():
            pieces.setdefault(quasi_degree(exps, w), {})[exps] = c
        return {delta: Polynomial(t, self.nvars) for delta, t in sorted(pieces.items())}

    def sorted_terms(self, w: WeightSystem | None = None) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical order: by quasi-degree (or total degree), then lexicographically descending."""

        def key(item: tuple[Monomial, Fraction]) -> tuple:
            exps = item[0]
            grade = quasi_degree(exps, w) if w is not None else sum(exps)
            return (grade, tuple(-e for e in exps))

        return sorted(self.terms.items(), key=key)

    def restrict(self, nvars: int) -> "Polynomial":
        """Set the trailing variables to zero and drop them."""
        kept = {exps[:nvars]: c for exps, c in self.terms.items() if not any(exps[nvars:])}
        return Polynomial(kept, nvars)

    def extend(self, nvars: int) -> "Polynomial":
        pad = (0,) * (nvars - self.nvars)
        return Polynomial({exps + pad: c for exps, c in self.terms.items()}, nvars)

    def __str__(self) -> str:
        return format_polynomial(self, [f"x{i + 1}" for i in range(self.nvars)])

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_polynomial(p: Polynomial, names: Sequence[str], w: WeightSystem | None = None) -> str:
    """Render in the `^`, `*`, `p/q` syntax read by the parser."""
    if p.is_zero():
        return "0"
    pieces = []
    for exps, c in p.sorted_terms(w):
        factors = [name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps, strict=True) if e]
        magnitude = abs(c)
        if not factors:
            body = _format_coefficient(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coefficient(magnitude), *factors])
        sign = "-" if c < 0 else "+"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


class TaylorSeries1D:
    """Finite exact series in one variable `t`."""

    __slots__ = ("_hash", "coefficients")

    def __init__(self, coefficients: Mapping[int, Scalar] | None = None) -> None:
        cleaned = {}
        for e, c in (coefficients or {}).items():
            if e < 0:
                raise ValueError("negative exponents are not allowed in a series")
            value = as_fraction(c)
            if value != 0:
                cleaned[e] = value
        self.coefficients: immutabledict[int, Fraction] = immutabledict(sorted(cleaned.items()))
        self._hash: int | None = None

    @classmethod
    def monomial(cls, exponent: int, coeff: Scalar = 1) -> "TaylorSeries1D":
        return cls({exponent: coeff})

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "TaylorSeries1D":
        if p.nvars != 1:
            raise DimensionError("a series needs a polynomial in one variable")
        return cls({exps[0]: c for exps, c in p.terms.items()})

    def is_zero(self) -> bool:
        return not self.coefficients

    def __bool__(self) -> bool:
        return bool(self.coefficients)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int | Fraction):
            other = TaylorSeries1D({0: other})
        if not isinstance(other, TaylorSeries1D):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self.coefficients.items()))
        return self._hash

    def coefficient(self, exponent: int) -> Fraction:
        return self.coefficients.get(exponent, Fraction(0))

    @property
    def order(self) -> Order:
        return next(iter(self.coefficients), INFINITY)

    @property
    def max_exponent(self) -> int:
        return max(self.coefficients, default=0)

    def __add__(self, other: "TaylorSeries1D") -> "TaylorSeries1D":
        result = dict(self.coefficients)
        for e, c in other.coefficients.items():
            result[e] = result.get(e, 0) + c
        return TaylorSeries1D(result)

    def __neg__(self) -> "TaylorSeries1D":
        return TaylorSeries1D({e: -c for e, c in self.coefficients.items()})

    def __sub__(self, other: "TaylorSeries1D") -> "TaylorSeries1D":
        return self + (-other)

    def __mul__(self, other: "TaylorSeries1D | Scalar") -> "TaylorSeries1D":
        if not isinstance(other, TaylorSeries1D):
            c = as_fraction(other)
            return TaylorSeries1D({e: c * v for e, v in self.coefficients.items()})
        result: dict[int, Fraction] = {}
        for e1, c1 in self.coefficients.items():
            for e2, c2 in other.coefficients.items():
                result[e1 + e2] = result.get(e1 + e2, 0) + c1 * c2
        return TaylorSeries1D(result)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "TaylorSeries1D":
        result = TaylorSeries1D({0: 1})
        for _ in range(exponent):
            result = result * self
        return result

    def derivative(self) -> "TaylorSeries1D":
        return TaylorSeries1D({e - 1: c * e for e, c in self.coefficients.items() if e})

    def truncate(self, bound: int) -> "TaylorSeries1D":
        """Keep the exponents below `bound`."""
        return TaylorSeries1D({e: c for e, c in self.coefficients.items() if e < bound})

    def __str__(self) -> str:
        as_poly = Polynomial({(e,): c for e, c in self.coefficients.items()}, 1)
        return format_polynomial(as_poly, ["t"])

    def __repr__(self) -> str:
        return f"TaylorSeries1D({self})"


class BranchParam:
    """A parameterized curve branch through the origin, one series per ambient variable."""

    __slots__ = ("components", "label")

    def __init__(self, components: Iterable[TaylorSeries1D], label: str = "") -> None:
        self.components: tuple[TaylorSeries1D, ...] = tuple(components)
        self.label = label
        for i, comp in enumerate(self.components):
            if comp.coefficient(0) != 0:
                raise ValueError(f"component {i + 1} of branch {label!r} does not vanish at t=0")

    @property
    def nvars(self) -> int:
        return len(self.components)

    def component_orders(self) -> tuple[Order, ...]:
        return tuple(comp.order for comp in self.components)

    @property
    def max_exponent(self) -> int:
        return max((comp.max_exponent for comp in self.components), default=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BranchParam):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"

    def __repr__(self) -> str:
        return f"BranchParam({self.label!r}, {self})"


@lru_cache(maxsize=65536)
def _component_power(b: BranchParam, index: int, exponent: int) -> TaylorSeries1D:
    if exponent == 0:
        return TaylorSeries1D({0: 1})
    if exponent == 1:
        return b.components[index]
    return _component_power(b, index, exponent - 1) * b.components[index]


@lru_cache(maxsize=65536)
def monomial_on_branch(exps: Monomial, b: BranchParam) -> TaylorSeries1D:
    result = TaylorSeries1D({0: 1})
    for i, e in enumerate(exps):
        if e:
            result = result * _component_power(b, i, e)
            if result.is_zero():
                break
    return result


def substitute_branch(p: Polynomial, b: BranchParam) -> TaylorSeries1D:
    """Exact composition p(b(t))."""
    if p.nvars != b.nvars:
        raise DimensionError(f"polynomial in {p.nvars} variables on a branch with {b.nvars} components")
    result = TaylorSeries1D()
    for exps, c in p.terms.items():
        result = result + monomial_on_branch(exps, b) * c
    return result


def vanishing_order(s: TaylorSeries1D) -> Order:
    """Least exponent with a nonzero coefficient; INFINITY for the zero series."""
    return s.order

"""Recursive descent parser for polynomials, forms, curve parameterizations and vector fields.

Syntax: `+`, `-`, `*`, integer literals, `/` by an integer literal, parentheses, `^` followed by an integer is a
power and `^` followed by anything else is a wedge. Differentials are written `d` + variable name (`dx2`).
Named forms (such as basis labels) can be supplied as symbols.
"""

from collections.abc import Mapping, Sequence
from fractions import Fraction
import re

from symplectic_restrictions.errors import GermParseError
from symplectic_restrictions.exterior import DiffForm, VectorField, euler_field, wedge
from symplectic_restrictions.qpoly import BranchParam, Polynomial, TaylorSeries1D, WeightSystem

_TOKEN = re.compile(r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    position = 0
    text = text.split("#", 1)[0].rstrip()
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            break
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        position = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str], symbols: Mapping[str, DiffForm] | None) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = list(variables)
        self.nvars = len(self.variables)
        self.symbols = dict(symbols or {})

    def error(self, message: str) -> GermParseError:
        where = self.tokens[self.pos][2] if self.pos < len(self.tokens) else len(self.text)
        return GermParseError(f"{message} at column {where + 1} in {self.text.strip()!r}")

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def accept(self, op: str) -> bool:
        token = self.peek()
        if token is not None and token[0] == "op" and token[1] == op:
            self.pos += 1
            return True
        return False

    def expect(self, op: str) -> None:
        if not self.accept(op):
            raise self.error(f"expected {op!r}")

    def parse(self) -> DiffForm:
        if not self.tokens:
            raise self.error("empty expression")
        value = self.expression()
        if self.peek() is not None:
            raise self.error("unexpected token")
        return value

    def add(self, a: DiffForm, b: DiffForm) -> DiffForm:
        if a.degree != b.degree:
            if a.is_zero():
                return b
            if b.is_zero():
                return a
            raise self.error(f"cannot add a {a.degree}-form and a {b.degree}-form")
        return a + b

    def expression(self) -> DiffForm:
        value = self.term()
        while True:
            if self.accept("+"):
                value = self.add(value, self.term())
            elif self.accept("-"):
                value = self.add(value, -self.term())
            else:
                return value

    def term(self) -> DiffForm:
        value = self.unary()
        while True:
            if self.accept("*"):
                value = self.multiply(value, self.unary())
            elif self.accept("/"):
                token = self.peek()
                if token is None or token[0] != "number" or int(token[1]) == 0:
                    raise self.error("division is only allowed by a nonzero integer literal")
                self.pos += 1
                value = value * Fraction(1, int(token[1]))
            else:
                return value

    def multiply(self, a: DiffForm, b: DiffForm) -> DiffForm:
        if a.degree == 0:
            return b * a.terms.get((), Polynomial.zero(self.nvars))
        if b.degree == 0:
            return a * b.terms.get((), Polynomial.zero(self.nvars))
        raise self.error("use '^' to wedge forms of positive degree")

    def unary(self) -> DiffForm:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> DiffForm:
        value = self.atom()
        while self.accept("^"):
            token = self.peek()
            if token is not None and token[0] == "number":
                self.pos += 1
                if value.degree != 0:
                    raise self.error("powers of forms of positive degree are not defined")
                value = DiffForm.function(value.terms.get((), Polynomial.zero(self.nvars)) ** int(token[1]))
            else:
                value = wedge(value, self.atom())
        return value

    def atom(self) -> DiffForm:
        token = self.peek()
        if token is None:
            raise self.error("unexpected end of expression")
        kind, text, _ = token
        if kind == "number":
            self.pos += 1
            return DiffForm.function(Polynomial.constant(int(text), self.nvars))
        if kind == "name":
            self.pos += 1
            if text in self.symbols:
                return self.symbols[text]
            if text in self.variables:
                return DiffForm.function(Polynomial.variable(self.variables.index(text), self.nvars))
            if text.startswith("d") and text[1:] in self.variables:
                return DiffForm.dx(self.variables.index(text[1:]), self.nvars)
            self.pos -= 1
            raise self.error(f"unknown name {text!r}")
        if self.accept("("):
            value = self.expression()
            self.expect(")")
            return value
        raise self.error(f"unexpected {text!r}")


def parse_form(text: str, variables: Sequence[str], symbols: Mapping[str, DiffForm] | None = None) -> DiffForm:
    return _Parser(text, variables, symbols).parse()


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    value = parse_form(text, variables)
    if value.degree != 0:
        raise GermParseError(f"expected a polynomial, got a {value.degree}-form in {text.strip()!r}")
    return value.terms.get((), Polynomial.zero(len(variables)))


def parse_series(text: str, parameter: str = "t") -> TaylorSeries1D:
    return TaylorSeries1D.from_polynomial(parse_polynomial(text, [parameter]))


def split_tuple(text: str) -> list[str]:
    """Split `(a, b, c)` at top-level commas."""
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise GermParseError(f"expected a parenthesized tuple, got {text.strip()!r}")
    body = body[1:-1]
    parts, depth, current = [], 0, []
    for char in body:
        if char == "," and depth == 0:
            parts.append("".join(current))
            current = []
            continue
        depth += {"(": 1, ")": -1}.get(char, 0)
        current.append(char)
    parts.append("".join(current))
    return [part.strip() for part in parts]


def parse_branch(text: str, label: str = "", nvars: int | None = None) -> BranchParam:
    components = [parse_series(part) for part in split_tuple(text)]
    if nvars is not None and len(components) != nvars:
        raise GermParseError(f"branch {label!r} has {len(components)} components, expected {nvars}")
    try:
        return BranchParam(components, label)
    except ValueError as e:
        raise GermParseError(str(e)) from e


def parse_field(text: str, variables: Sequence[str], w: WeightSystem) -> VectorField:
    """A monomial multiple of the Euler field (`x1*x3*E`, `E`) or an explicit component tuple."""
    body = text.strip()
    if body.startswith("("):
        components = [parse_polynomial(part, variables) for part in split_tuple(body)]
        if len(components) != len(variables):
            raise GermParseError(f"vector field needs {len(variables)} components in {body!r}")
        return VectorField(components)
    if body == "E":
        factor = Polynomial.constant(1, len(variables))
    elif body.endswith("*E"):
        factor = parse_polynomial(body[:-2], variables)
    else:
        factor = parse_polynomial(body, variables)
    return euler_field(w) * factor

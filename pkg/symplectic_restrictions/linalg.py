"""Exact linear algebra over the rationals.

Dense routines work on lists of Fraction rows; `IncrementalSystem` keeps a sparse echelon form that grows one
equation at a time.
"""

from collections.abc import Mapping, Sequence
from fractions import Fraction

Row = list[Fraction]
Matrix = list[Row]


def _copy(rows: Sequence[Sequence[Fraction]]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def row_reduce(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form.

    Pivots are searched column by column in order, so the result only depends on the column order.

    Args:
        rows (Sequence[Sequence[Fraction]]): Input rows, left untouched.
        ncols (int | None): Column count, needed when `rows` is empty.

    Returns:
        tuple[Matrix, list[int]]: The nonzero rows of the reduced form and their pivot columns.
    """
    m = _copy(rows)
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    piv_r = 0
    for piv_c in range(ncols):
        for i_row in range(piv_r, len(m)):
            if m[i_row][piv_c] != 0:
                break
        else:
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
        fp = m[piv_r][piv_c]
        if fp != 1:
            m[piv_r] = [v / fp for v in m[piv_r]]
        pivot_row = m[piv_r]
        for r in range(len(m)):
            if r == piv_r:
                continue
            fr = m[r][piv_c]
            if fr == 0:
                continue
            m[r] = [a - fr * b for a, b in zip(m[r], pivot_row, strict=True)]
        pivots.append(piv_c)
        piv_r += 1
        if piv_r == len(m):
            break
    return m[:piv_r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(row_reduce(rows)[1])


def reduce_vector(vector: Sequence[Fraction], rref: Sequence[Sequence[Fraction]], pivots: Sequence[int]) -> Row:
    """Remainder of `vector` modulo the row space of an echelon basis."""
    v = [Fraction(x) for x in vector]
    for row, p in zip(rref, pivots, strict=True):
        c = v[p]
        if c != 0:
            v = [a - c * b for a, b in zip(v, row, strict=True)]
    return v


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Row | None:
    """One solution of matrix·y = rhs with free variables set to zero, or None if inconsistent."""
    if not matrix:
        return [] if all(v == 0 for v in rhs) else None
    ncols = len(matrix[0])
    augmented = [[*row, Fraction(b)] for row, b in zip(matrix, rhs, strict=True)]
    rref, pivots = row_reduce(augmented, ncols + 1)
    if ncols in pivots:
        return None
    solution = [Fraction(0)] * ncols
    for row, p in zip(rref, pivots, strict=True):
        solution[p] = row[ncols]
    return solution


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> Matrix:
    """Basis of {y : rows·y = 0}."""
    ncols = len(rows[0]) if ncols is None else ncols
    rref, pivots = row_reduce(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        y = [Fraction(0)] * ncols
        y[f] = Fraction(1)
        for row, p in zip(rref, pivots, strict=True):
            y[p] = -row[f]
        basis.append(y)
    return basis


def transpose(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> Matrix:
    ncols = len(rows[0]) if ncols is None else ncols
    return [[Fraction(row[c]) for row in rows] for c in range(ncols)]


def mat_vec(matrix: Sequence[Sequence[Fraction]], vector: Sequence[Fraction]) -> Row:
    return [sum((a * b for a, b in zip(row, vector, strict=True)), Fraction(0)) for row in matrix]


def determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    m = _copy(matrix)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c], strict=True)]
    return det


SparseRow = dict[int, Fraction]


def _axpy(target: SparseRow, factor: Fraction, source: Mapping[int, Fraction]) -> None:
    """target -= factor * source, dropping cancelled entries."""
    for k, v in source.items():
        value = target.get(k, 0) - factor * v
        if value:
            target[k] = value
        else:
            target.pop(k, None)


class IncrementalSystem:
    """Sparse linear system grown one equation at a time.

    Each equation has a right-hand side that is a linear functional of a parameter vector, given as a sparse map
    parameter index -> coefficient. Echelon rows are normalized with their pivot at the smallest column. An added
    equation that reduces to zero leaves a functional that has to vanish for the system to be consistent.
    """

    def __init__(self) -> None:
        self._rows: dict[int, tuple[SparseRow, SparseRow]] = {}
        self.conditions: list[SparseRow] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def add_equation(self, coefficients: Mapping[int, Fraction], rhs: Mapping[int, Fraction]) -> SparseRow | None:
        """Add sum(coefficients[c] * y[c]) = rhs(params).

        Returns:
            SparseRow | None: The consistency condition the equation produced, if any.
        """
        row = {k: Fraction(v) for k, v in coefficients.items() if v}
        value = {k: Fraction(v) for k, v in rhs.items() if v}
        while row:
            col = min(row)
            echelon = self._rows.get(col)
            if echelon is None:
                lead = row[col]
                if lead != 1:
                    row = {k: v / lead for k, v in row.items()}
                    value = {k: v / lead for k, v in value.items()}
                self._rows[col] = (row, value)
                return None
            factor = row[col]
            _axpy(row, factor, echelon[0])
            _axpy(value, factor, echelon[1])
        if value:
            self.conditions.append(value)
            return value
        return None

    def is_consistent(self, params: Mapping[int, Fraction]) -> bool:
        return all(_evaluate(condition, params) == 0 for condition in self.conditions)

    def solve(self, params: Mapping[int, Fraction]) -> dict[int, Fraction] | None:
        """One solution with free variables set to zero, or None when inconsistent."""
        if not self.is_consistent(params):
            return None
        solution: dict[int, Fraction] = {}
        for col in sorted(self._rows, reverse=True):
            row, value = self._rows[col]
            y = _evaluate(value, params)
            for k, v in row.items():
                if k != col:
                    y -= v * solution.get(k, 0)
            if y:
                solution[col] = y
        return solution


def _evaluate(functional: Mapping[int, Fraction], params: Mapping[int, Fraction]) -> Fraction:
    return sum((c * Fraction(params.get(k, 0)) for k, c in functional.items()), Fraction(0))

"""Exact integer linear algebra for the elimination engine.

Everything here is computed over arbitrary-precision integers (rationals only
appear in intermediate eliminations), so results are exact at any magnitude.
The module provides just what the engine needs: ranks, determinants,
full-rank row selections and Cramer-style inverse data for small dense
systems.  Matrices are tiny (the number of periods of a presentation), so the
classic O(n^3)/O(n^5) dense algorithms are the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .errors import DegenerateInputError, DimensionError, SingularMatrixError


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major, with at least one row and column."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise DimensionError("matrix must have at least one row and one column")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise DimensionError("ragged rows in matrix")
            for value in row:
                if not isinstance(value, int) or isinstance(value, bool):
                    raise DimensionError(f"matrix entry {value!r} is not an int")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(v) for v in row) for row in rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        if not columns or not columns[0]:
            raise DimensionError("matrix must have at least one row and one column")
        height = len(columns[0])
        return cls.from_rows([[col[i] for col in columns] for i in range(height)])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.column(j) for j in range(self.cols)])

    def select_rows(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows([self.entries[i] for i in indices])

    def mul_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise DimensionError("vector length does not match column count")
        return tuple(sum(r * x for r, x in zip(row, v)) for row in self.entries)


@dataclass(frozen=True)
class RowSelection:
    """A strictly increasing choice of row indices into a source matrix."""

    indices: tuple[int, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise DimensionError("row selection must be strictly increasing")


@dataclass(frozen=True)
class CramerSolution:
    """Exact inverse data for an invertible square system.

    For the system ``M z = x - offset_vector`` the solution satisfies, for
    every rational x and z,

        denom * z_i  =  sum_j matrix[i][j] * x_j  +  offset[i]

    with ``denom`` the absolute value of ``det M`` and all entries integers.
    """

    denom: int
    matrix: tuple[tuple[int, ...], ...]
    offset: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.offset)

    def numerators(self, x: Sequence[int]) -> tuple[int, ...]:
        """The vector ``denom * z`` for a concrete integer point ``x``."""
        if len(x) != self.size:
            raise DimensionError("point length does not match system size")
        return tuple(
            sum(c * v for c, v in zip(row, x)) + g
            for row, g in zip(self.matrix, self.offset)
        )


def _reduce_against_basis(
    basis: list[list[Fraction]], vector: Sequence[int]
) -> Optional[list[Fraction]]:
    """Reduce ``vector`` against a row basis kept in echelon form.

    Returns the residual (normalised to leading coefficient 1) if it is
    nonzero, i.e. the vector is independent of the basis; None otherwise.
    The basis rows each have a unique leading (first nonzero) position.
    """
    work = [Fraction(v) for v in vector]
    for row in basis:
        lead = next(i for i, v in enumerate(row) if v)
        if work[lead]:
            factor = work[lead]
            for i in range(lead, len(work)):
                work[i] -= factor * row[i]
    for i, v in enumerate(work):
        if v:
            inv = Fraction(1) / v
            return [x * inv for x in work]
    return None


def rank_over_rationals(m: IntMatrix) -> int:
    """Rank of the matrix over the rationals, by exact elimination."""
    basis: list[list[Fraction]] = []
    for i in range(m.rows):
        residual = _reduce_against_basis(basis, m.row(i))
        if residual is not None:
            basis.append(residual)
    return len(basis)


def determinant(m: IntMatrix) -> int:
    """Exact determinant via Bareiss fraction-free elimination."""
    if m.rows != m.cols:
        raise DimensionError(f"determinant of a {m.rows}x{m.cols} matrix")
    n = m.rows
    a = [list(row) for row in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # Bareiss step: the division by the previous pivot is exact.
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def find_full_rank_submatrix(
    m: IntMatrix, forbidden_row: Optional[int] = None
) -> Optional[RowSelection]:
    """Lexicographically least selection of ``cols`` independent rows.

    Rows are scanned in index order and greedily added when they enlarge the
    span; by the matroid exchange property the greedy basis is the
    lexicographically least one.  ``forbidden_row`` (if given) is skipped.
    Returns None when no selection avoiding the forbidden row reaches full
    column rank.
    """
    target = m.cols
    basis: list[list[Fraction]] = []
    chosen: list[int] = []
    for i in range(m.rows):
        if i == forbidden_row:
            continue
        residual = _reduce_against_basis(basis, m.row(i))
        if residual is not None:
            basis.append(residual)
            chosen.append(i)
            if len(chosen) == target:
                return RowSelection(tuple(chosen))
    return None


def greedy_row_basis(m: IntMatrix, limit: int) -> list[int]:
    """Lexicographically least independent subset of the first ``limit`` rows
    spanning their row space."""
    basis: list[list[Fraction]] = []
    chosen: list[int] = []
    for i in range(limit):
        residual = _reduce_against_basis(basis, m.row(i))
        if residual is not None:
            basis.append(residual)
            chosen.append(i)
    return chosen


def _adjugate(entries: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(entries)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [entries[r][c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            cof = determinant(IntMatrix.from_rows(minor))
            if (i + j) % 2:
                cof = -cof
            adj[j][i] = cof  # transpose of the cofactor matrix
    return adj


def cramer_solve(m: IntMatrix, offset_vector: Sequence[int]) -> CramerSolution:
    """Inverse data ``denom * z = matrix * x + offset`` for ``M z = x - a``.

    ``denom`` is ``|det M|``; the sign of the determinant is absorbed into
    the coefficient matrix and offset so residue classes stay in
    ``0 .. denom-1``.
    """
    if m.rows != m.cols:
        raise DimensionError("cramer_solve needs a square matrix")
    if len(offset_vector) != m.rows:
        raise DimensionError("offset vector length does not match matrix size")
    det = determinant(m)
    if det == 0:
        raise SingularMatrixError("matrix is singular")
    sign = 1 if det > 0 else -1
    adj = _adjugate(m.entries)
    coeffs = tuple(tuple(sign * v for v in row) for row in adj)
    gamma = tuple(
        -sum(c * a for c, a in zip(row, offset_vector)) for row in coeffs
    )
    return CramerSolution(denom=abs(det), matrix=coeffs, offset=gamma)


def positive_lcm(values: Sequence[int]) -> int:
    """Positive lcm of the absolute values of the nonzero entries."""
    nonzero = [abs(v) for v in values if v]
    if not nonzero:
        raise DegenerateInputError("positive_lcm of all-zero values")
    return lcm(*nonzero)


def solve_unique(
    rows: Sequence[Sequence[int]], rhs: Sequence[int]
) -> Optional[tuple[Fraction, ...]]:
    """Solve ``rows * c = rhs`` exactly when the solution is unique.

    Returns None if the system is inconsistent and raises
    :class:`DegenerateInputError` if it is consistent but underdetermined.
    """
    if not rows:
        raise DimensionError("empty system")
    width = len(rows[0])
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(aug)) if aug[i][col]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = Fraction(1) / aug[r][col]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][col]:
                factor = aug[i][col]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if aug[i][width]:
            return None
    if len(pivots) < width:
        raise DegenerateInputError("system is underdetermined")
    solution = [Fraction(0)] * width
    for row_idx, col in enumerate(pivots):
        solution[col] = aug[row_idx][width]
    return tuple(solution)

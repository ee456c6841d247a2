"""Exact rational linear algebra: dense matrices, determinants, rank, solving.

All scalars are ``fractions.Fraction``; every operation is exact. Vectors are
plain tuples of Fractions, matrices are immutable row-major grids.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotSquare, Singular

Rat = Fraction
Vec = tuple[Fraction, ...]


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def vector(entries: Iterable) -> Vec:
    return tuple(frac(e) for e in entries)


def vdot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatch(f"dot of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vadd(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vec:
    if len(u) != len(v):
        raise DimensionMismatch(f"add of lengths {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vec:
    if len(u) != len(v):
        raise DimensionMismatch(f"sub of lengths {len(u)} and {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def vscale(s, u: Sequence[Fraction]) -> Vec:
    s = frac(s)
    return tuple(s * a for a in u)


class Matrix:
    """Immutable dense matrix of Fractions with bounds-checked access."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable]):
        grid = tuple(tuple(frac(x) for x in row) for row in data)
        if grid and any(len(r) != len(grid[0]) for r in grid):
            raise DimensionMismatch("ragged rows")
        object.__setattr__(self, "_data", grid)
        object.__setattr__(self, "rows", len(grid))
        object.__setattr__(self, "cols", len(grid[0]) if grid else 0)

    def __setattr__(self, *_):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def outer(cls, u: Sequence, v: Sequence) -> "Matrix":
        u, v = vector(u), vector(v)
        return cls([[a * b for b in v] for a in u])

    def _check(self, i: int, j: int) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i},{j}) out of bounds for {self.rows}x{self.cols}")

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        self._check(i, j)
        return self._data[i][j]

    def row(self, i: int) -> Vec:
        self._check(i, 0)
        return self._data[i]

    def col(self, j: int) -> Vec:
        self._check(0, j)
        return tuple(r[j] for r in self._data)

    def transpose(self) -> "Matrix":
        return Matrix(zip(*self._data)) if self.rows else Matrix([])

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        return Matrix([[self[i, j] for j in col_idx] for i in row_idx])

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix add shape mismatch")
        return Matrix(vadd(a, b) for a, b in zip(self._data, other._data))

    def __sub__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix sub shape mismatch")
        return Matrix(vsub(a, b) for a, b in zip(self._data, other._data))

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, s) -> "Matrix":
        s = frac(s)
        return Matrix(tuple(s * x for x in row) for row in self._data)

    def shift(self, s) -> "Matrix":
        """Add a constant to every entry."""
        s = frac(s)
        return Matrix(tuple(x + s for x in row) for row in self._data)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch("matmul shape mismatch")
        cols = other.transpose()._data
        return Matrix([[vdot(r, c) for c in cols] for r in self._data])

    def mul_vec(self, v: Sequence[Fraction]) -> Vec:
        return tuple(vdot(r, v) for r in self._data)

    def entries(self) -> Iterable[Fraction]:
        for row in self._data:
            yield from row

    def min_entry(self) -> Fraction:
        return min(self.entries())

    def max_abs(self) -> Fraction:
        return max((abs(x) for x in self.entries()), default=Fraction(0))

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries())

    def tolists(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self._data == other._data

    def __hash__(self) -> int:
        return hash(self._data)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self._data)
        return f"Matrix({self.rows}x{self.cols}: {body})"


def _integer_rows(m: Matrix) -> tuple[list[list[int]], Fraction]:
    """Scale each row to integers; return rows and the product of scale factors."""
    rows: list[list[int]] = []
    factor = Fraction(1)
    for i in range(m.rows):
        row = m.row(i)
        mult = lcm(*(x.denominator for x in row)) if row else 1
        factor *= mult
        rows.append([int(x * mult) for x in row])
    return rows, factor


def determinant(m: Matrix) -> Fraction:
    """Exact determinant via Bareiss fraction-free elimination."""
    if m.rows != m.cols:
        raise NotSquare(f"{m.rows}x{m.cols}")
    n = m.rows
    if n == 0:
        return Fraction(1)
    a, factor = _integer_rows(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1]) / factor


def matrix_rank(m: Matrix) -> int:
    """Exact rank over the rationals (fraction-free row echelon)."""
    a, _ = _integer_rows(m)
    rank = 0
    row = 0
    for col in range(m.cols):
        pivot = next((r for r in range(row, m.rows) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        for r in range(row + 1, m.rows):
            if a[r][col] != 0:
                mult_r, mult_p = a[row][col], a[r][col]
                a[r] = [mult_r * x - mult_p * y for x, y in zip(a[r], a[row])]
        rank += 1
        row += 1
        if row == m.rows:
            break
    return rank


def solve_linear_system(m: Matrix, rhs: Sequence[Fraction]) -> Vec:
    """Solve m @ z = rhs exactly; raises Singular when no unique solution exists."""
    if m.rows != m.cols:
        raise NotSquare(f"{m.rows}x{m.cols}")
    n = m.rows
    if len(rhs) != n:
        raise DimensionMismatch("rhs length mismatch")
    aug = [list(m.row(i)) + [frac(rhs[i])] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise Singular(f"zero pivot in column {col}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(aug[r][n] for r in range(n))

import random
from fractions import Fraction
from itertools import permutations

import pytest

from rankgames.errors import DimensionMismatch, NotSquare, Singular
from rankgames.linalg import Matrix, determinant, matrix_rank, solve_linear_system

from fixtures import EX1_A, EX1_C


def naive_determinant(m: Matrix) -> Fraction:
    """Independent O(n!) Leibniz-expansion oracle."""
    n = m.rows
    total = Fraction(0)
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):  # parity by counting inversions
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = Fraction(1)
        for i in range(n):
            term *= m[i, perm[i]]
        total += sign * term
    return total


def test_determinant_identity():
    assert determinant(Matrix.identity(3)) == 1


def test_determinant_2x2():
    assert determinant(Matrix([[0, 9], [6, 6]])) == -54


def test_determinant_requires_square():
    with pytest.raises(NotSquare):
        determinant(Matrix([[1, 2, 3], [4, 5, 6]]))


def test_determinant_matches_naive_oracle():
    rng = random.Random(4)
    for _ in range(60):
        n = rng.randint(1, 5)
        m = Matrix(
            [
                [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
                for _ in range(n)
            ]
        )
        assert determinant(m) == naive_determinant(m)


def test_determinant_of_first_path_vertex_system_positive():
    # Tight system of the first bounded node of the worked example; its sign
    # anchors the traversal orientation. Value cross-checked by the naive oracle.
    ev = Matrix([[1, 1, 1, 0], [0, 9, 9, -1], [-1, 0, 0, 0], [0, 0, -1, 0]])
    ew = Matrix(
        [
            [0, 9, 7, 0, 0],
            [1, 6, 8, 0, 0],
            [1, 5, 8, -1, 0],
            [1, 4, 3, 0, -1],
            [0, -1, -1, 0, 0],
        ]
    )
    prod = determinant(ev) * determinant(ew)
    assert prod == naive_determinant(ev) * naive_determinant(ew)
    assert prod > 0


def test_solve_identity():
    sol = solve_linear_system(Matrix.identity(2), (Fraction(2, 3), Fraction(-1)))
    assert sol == (Fraction(2, 3), Fraction(-1))


def test_solve_symmetric_pair():
    sol = solve_linear_system(Matrix([[1, 1], [1, -1]]), (1, 0))
    assert sol == (Fraction(1, 2), Fraction(1, 2))


def test_solve_vertex_basis_of_worked_example():
    # Rows 1 and 3 tight plus y3 = 0 and the simplex equality give the interior
    # path vertex y = (2/11, 9/11, 0), payoff 81/11 (solves 9 - 9t = 7 + 2t).
    rows = [
        [1, 1, 1, 0],
        [0, 9, 9, -1],
        [9, 7, 2, -1],
        [0, 0, 1, 0],
    ]
    sol = solve_linear_system(Matrix(rows), (1, 0, 0, 0))
    assert sol == (Fraction(2, 11), Fraction(9, 11), Fraction(0), Fraction(81, 11))


def test_solve_singular():
    with pytest.raises(Singular):
        solve_linear_system(Matrix([[1, 1], [2, 2]]), (1, 2))


def test_rank_zero_matrix():
    assert matrix_rank(Matrix.zero(3, 4)) == 0


def test_rank_outer_product():
    assert matrix_rank(Matrix.outer((1, 2, 3), (4, 5))) == 1


def test_rank_of_dense_sum():
    assert matrix_rank(EX1_A + EX1_C) == 3


def test_matrix_access_is_bounds_checked():
    m = Matrix([[1, 2], [3, 4]])
    with pytest.raises(IndexError):
        m[2, 0]
    with pytest.raises(IndexError):
        m[0, -1]


def test_matrix_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        Matrix([[1, 2], [3]])

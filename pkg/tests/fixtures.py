"""Shared fixtures: the worked example, canonical rank-1 games, generators."""
from __future__ import annotations

import random
from fractions import Fraction

from rankgames.errors import DegeneracyError, RankGamesError
from rankgames.games import BimatrixGame, Rank1Decomposition
from rankgames.linalg import Matrix
from rankgames.polytope import GameFamily

# Worked example: a game family whose fully-labeled set is a path plus one
# 3-cycle. Derived path vertices (exact): ((0,1,0),9) -> ((2/11,9/11,0),81/11)
# -> ((1,0,0),9); cycle vertices ((1/2,0,1/2),11/2), ((13/34,3/17,15/34),189/34),
# ((2/5,0,3/5),27/5).
EX1_A = Matrix([[0, 9, 9], [6, 6, 5], [9, 7, 2]])
EX1_C = Matrix([[6, 8, 6], [5, 8, 8], [4, 3, 0]])
EX1_BETA = (Fraction(9), Fraction(7), Fraction(8))

EX1_PATH_P_VERTICES = (
    ((Fraction(0), Fraction(1), Fraction(0)), Fraction(9)),
    ((Fraction(2, 11), Fraction(9, 11), Fraction(0)), Fraction(81, 11)),
    ((Fraction(1), Fraction(0), Fraction(0)), Fraction(9)),
)
EX1_CYCLE_P_VERTICES = (
    ((Fraction(1, 2), Fraction(0), Fraction(1, 2)), Fraction(11, 2)),
    ((Fraction(13, 34), Fraction(3, 17), Fraction(15, 34)), Fraction(189, 34)),
    ((Fraction(2, 5), Fraction(0), Fraction(3, 5)), Fraction(27, 5)),
)
# Paper prints the same vertices rounded to two decimals.
EX1_PATH_P_DECIMALS = (((0.0, 1.0, 0.0), 9.0), ((0.18, 0.82, 0.0), 7.36), ((1.0, 0.0, 0.0), 9.0))
EX1_CYCLE_P_DECIMALS = (((0.5, 0.0, 0.5), 5.5), ((0.38, 0.18, 0.44), 5.56), ((0.4, 0.0, 0.6), 5.4))


def ex1_family() -> GameFamily:
    return GameFamily(EX1_A, EX1_C, EX1_BETA)


def rank1_game(a: Matrix, gamma, beta) -> BimatrixGame:
    return BimatrixGame(a, -a + Matrix.outer(gamma, beta))


# Canonical rank-1 fixture: clean pipeline end to end (nondegenerate
# polytopes, 6-node path, no cycles), unique fully-mixed-x equilibrium
# x = (0, 7/11, 4/11), y = (13/21, 8/21, 0) at lambda = 9/11, and the
# section probes at the two gamma extremes fall strictly below/above the
# selection hyperplane.
R1A = Rank1Decomposition(
    Matrix([[-7, 4, -2], [1, 7, 4], [9, -6, 8]]),
    (Fraction(-2), Fraction(3), Fraction(-3)),
    (Fraction(3), Fraction(1), Fraction(4)),
)
R1A_NE_X = (Fraction(0), Fraction(7, 11), Fraction(4, 11))
R1A_NE_Y = (Fraction(13, 21), Fraction(8, 21), Fraction(0))
R1A_NE_LAMBDA = Fraction(9, 11)

# Rank-1 fixture with three equilibria (indices +1, -1, +1): exercises
# oddness, the index-sum theorem, and multi-crossing enumeration.
R1B = Rank1Decomposition(
    Matrix([[9, 3, -8], [-5, 0, -4], [1, -4, 1]]),
    (Fraction(-3), Fraction(3), Fraction(-3)),
    (Fraction(3), Fraction(4), Fraction(2)),
)
R1B_NE_KEYS = (
    ((Fraction(0), Fraction(0), Fraction(1)), (Fraction(0), Fraction(0), Fraction(1))),
    (
        (Fraction(0), Fraction(1, 3), Fraction(2, 3)),
        (Fraction(0), Fraction(5, 9), Fraction(4, 9)),
    ),
    (
        (Fraction(2, 61), Fraction(31, 61), Fraction(28, 61)),
        (Fraction(1, 169), Fraction(94, 169), Fraction(74, 169)),
    ),
)


# Rank-2 fixture: the worked example's row matrix with a two-term payoff sum.
K2_A = EX1_A
K2_B = -K2_A + Matrix.outer((1, 0, 0), (1, 2, 3)) + Matrix.outer((0, 1, 0), (5, 1, 4))
K2_GAME = BimatrixGame(K2_A, K2_B)


def random_rank1(rng: random.Random, m: int, n: int, span: int = 9,
                 gamma_span: int = 3, beta_span: int = 4) -> Rank1Decomposition:
    """One random integer rank-1 decomposition (beta nonconstant)."""
    while True:
        a = Matrix([[rng.randint(-span, span) for _ in range(n)] for _ in range(m)])
        gamma = tuple(Fraction(rng.randint(-gamma_span, gamma_span)) for _ in range(m))
        beta = tuple(Fraction(rng.randint(1, beta_span)) for _ in range(n))
        if len(set(beta)) == 1:
            continue
        return Rank1Decomposition(a, gamma, beta)


def nondegenerate_rank1_fixtures(seed: int, count: int, min_mn=2, max_mn=5,
                                 pipeline=None) -> list[Rank1Decomposition]:
    """Deterministic list of rank-1 instances that survive the full pipeline.

    ``pipeline`` is called on each candidate and may raise degeneracy errors;
    failures are skipped so the returned fixtures are operationally clean.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = rng.randint(min_mn, max_mn)
        n = rng.randint(min_mn, max_mn)
        d = random_rank1(rng, m, n)
        try:
            if pipeline is not None:
                pipeline(d)
        except (DegeneracyError, RankGamesError):
            continue
        out.append(d)
    return out


def random_general_games(seed: int, count: int, min_mn=2, max_mn=4, span=9,
                         pipeline=None) -> list[BimatrixGame]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = rng.randint(min_mn, max_mn)
        n = rng.randint(min_mn, max_mn)
        game = BimatrixGame(
            Matrix([[rng.randint(-span, span) for _ in range(n)] for _ in range(m)]),
            Matrix([[rng.randint(-span, span) for _ in range(n)] for _ in range(m)]),
        )
        try:
            if pipeline is not None:
                pipeline(game)
        except (DegeneracyError, RankGamesError):
            continue
        out.append(game)
    return out


MATCHING_PENNIES = BimatrixGame(
    Matrix([[1, -1], [-1, 1]]), Matrix([[-1, 1], [1, -1]])
)

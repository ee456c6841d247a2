"""Bimatrix games, payoff-sum factorizations, and exact equilibrium checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, lcm
from typing import Optional, Sequence

from .errors import DimensionMismatch, NotConstantBeta, RankTooHigh
from .linalg import Matrix, Rat, Vec, vdot, vector


@dataclass(frozen=True)
class BimatrixGame:
    """Two payoff matrices of equal shape; rows belong to player 1."""

    a: Matrix
    b: Matrix

    def __post_init__(self):
        if (self.a.rows, self.a.cols) != (self.b.rows, self.b.cols):
            raise DimensionMismatch("payoff matrices differ in shape")
        if self.a.rows < 1 or self.a.cols < 1:
            raise DimensionMismatch("empty game")

    @classmethod
    def from_lists(cls, a, b) -> "BimatrixGame":
        return cls(Matrix(a), Matrix(b))

    @property
    def m(self) -> int:
        return self.a.rows

    @property
    def n(self) -> int:
        return self.a.cols

    def payoff_sum(self) -> Matrix:
        return self.a + self.b

    def scale(self, s) -> "BimatrixGame":
        return BimatrixGame(self.a.scale(s), self.b.scale(s))


@dataclass(frozen=True)
class MixedProfile:
    """Exact mixed strategies of both players (simplex membership enforced)."""

    x: Vec
    y: Vec

    def __post_init__(self):
        object.__setattr__(self, "x", vector(self.x))
        object.__setattr__(self, "y", vector(self.y))
        for side in (self.x, self.y):
            if any(p < 0 for p in side) or sum(side) != 1:
                raise DimensionMismatch(f"not a probability vector: {side}")

    def support(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """1-based supports (I, J)."""
        return (
            tuple(i + 1 for i, p in enumerate(self.x) if p > 0),
            tuple(j + 1 for j, p in enumerate(self.y) if p > 0),
        )


@dataclass(frozen=True)
class EquilibriumRecord:
    profile: MixedProfile
    payoff1: Rat
    payoff2: Rat
    support: tuple[tuple[int, ...], tuple[int, ...]]
    index: Optional[int]  # +1, -1, or None when unknown
    provenance: str

    def key(self) -> tuple[Vec, Vec]:
        return (self.profile.x, self.profile.y)


def payoffs(game: BimatrixGame, p: MixedProfile) -> tuple[Rat, Rat]:
    ay = game.a.mul_vec(p.y)
    by = game.b.mul_vec(p.y)
    return vdot(p.x, ay), vdot(p.x, by)


def make_record(
    game: BimatrixGame, p: MixedProfile, provenance: str, index: Optional[int] = None
) -> EquilibriumRecord:
    p1, p2 = payoffs(game, p)
    return EquilibriumRecord(p, p1, p2, p.support(), index, provenance)


def verify_equilibrium(game: BimatrixGame, p: MixedProfile) -> bool:
    """Exact best-response check: every played pure strategy attains the max."""
    if len(p.x) != game.m or len(p.y) != game.n:
        raise DimensionMismatch("profile does not match game shape")
    row_payoffs = game.a.mul_vec(p.y)
    best1 = max(row_payoffs)
    if any(xi > 0 and row_payoffs[i] != best1 for i, xi in enumerate(p.x)):
        return False
    col_payoffs = game.b.transpose().mul_vec(p.x)
    best2 = max(col_payoffs)
    return not any(yj > 0 and col_payoffs[j] != best2 for j, yj in enumerate(p.y))


def default_beta(n: int) -> Vec:
    """Deterministic nonconstant embedding vector (1, 2, ..., n)."""
    return vector(range(1, n + 1))


@dataclass(frozen=True)
class Rank1Decomposition:
    """Factorization b = -a + gamma . beta^T of a rank-1 payoff sum."""

    a: Matrix
    gamma: Vec
    beta: Vec

    def game(self) -> BimatrixGame:
        return BimatrixGame(self.a, -self.a + Matrix.outer(self.gamma, self.beta))

    def game_at(self, alpha: Sequence[Fraction]) -> BimatrixGame:
        return BimatrixGame(self.a, -self.a + Matrix.outer(alpha, self.beta))


@dataclass(frozen=True)
class GeneralDecomposition:
    """Embedding b = c + gamma . beta^T of an arbitrary game."""

    a: Matrix
    c: Matrix
    gamma: Vec
    beta: Vec

    def game(self) -> BimatrixGame:
        return BimatrixGame(self.a, self.c + Matrix.outer(self.gamma, self.beta))


@dataclass(frozen=True)
class RankKDecomposition:
    """Factorization b = -a + sum_l gamma^l . beta^l^T with independent betas."""

    a: Matrix
    gammas: tuple[Vec, ...]
    betas: tuple[Vec, ...]

    @property
    def k(self) -> int:
        return len(self.betas)

    def game(self) -> BimatrixGame:
        b = -self.a
        for g, bt in zip(self.gammas, self.betas):
            b = b + Matrix.outer(g, bt)
        return BimatrixGame(self.a, b)


def _peel_rank1(m: Matrix) -> tuple[Vec, Vec, Matrix]:
    """Split off one rank-1 term at the first nonzero entry (row-major)."""
    pivot = next(
        ((i, j) for i in range(m.rows) for j in range(m.cols) if m[i, j] != 0), None
    )
    if pivot is None:
        raise ValueError("zero matrix has no rank-1 term")
    i0, j0 = pivot
    beta = m.row(i0)
    gamma = tuple(m[i, j0] / m[i0, j0] for i in range(m.rows))
    return gamma, beta, m - Matrix.outer(gamma, beta)


def decompose_rank1(
    game: BimatrixGame, beta_default: Optional[Sequence] = None
) -> Rank1Decomposition:
    """Exact rank-1 factorization of a + b; raises RankTooHigh above rank 1.

    For zero-sum games (a + b = 0) gamma is zero and beta falls back to the
    caller-supplied vector or the generic default (1, ..., n).
    """
    s = game.payoff_sum()
    if s.is_zero():
        beta = vector(beta_default) if beta_default is not None else default_beta(game.n)
        return Rank1Decomposition(game.a, vector([0] * game.m), beta)
    gamma, beta, residue = _peel_rank1(s)
    if not residue.is_zero():
        raise RankTooHigh("payoff sum has rank >= 2")
    return Rank1Decomposition(game.a, gamma, beta)


def decompose_rank_k(game: BimatrixGame) -> RankKDecomposition:
    """Greedy rank-1 peeling of a + b; yields k = rank(a + b) staircase terms."""
    gammas: list[Vec] = []
    betas: list[Vec] = []
    residue = game.payoff_sum()
    while not residue.is_zero():
        g, b, residue = _peel_rank1(residue)
        gammas.append(g)
        betas.append(b)
    return RankKDecomposition(game.a, tuple(gammas), tuple(betas))


def integerize(d: Rank1Decomposition) -> tuple[Rank1Decomposition, Rat]:
    """Clear denominators: a*c^2, gamma*c, beta*c with c the global LCM.

    Scales both payoff matrices by c^2, which leaves the equilibrium set
    untouched; returns the scale c^2.
    """
    denoms = [x.denominator for x in d.a.entries()]
    denoms += [x.denominator for x in d.gamma] + [x.denominator for x in d.beta]
    c = lcm(*denoms)
    scaled = Rank1Decomposition(
        d.a.scale(c * c),
        tuple(g * c for g in d.gamma),
        tuple(b * c for b in d.beta),
    )
    return scaled, Fraction(c * c)


def reduce_constant_beta(d: Rank1Decomposition) -> BimatrixGame:
    """Collapse a constant-beta rank-1 game to the zero-sum game (a, -a).

    With beta = t*(1,...,1) the column player's payoffs differ from -a by the
    per-row constants t*gamma_i, which never change a column argmax, so the
    equilibrium set is preserved exactly.
    """
    if any(b != d.beta[0] for b in d.beta):
        raise NotConstantBeta(f"beta {d.beta} is not constant")
    return BimatrixGame(d.a, -d.a)


def positivity_shift(game: BimatrixGame) -> tuple[BimatrixGame, Rat, Rat]:
    """Shift each payoff matrix by ceil(|min|) + 1 where needed (else 0)."""

    def shift_for(m: Matrix) -> Fraction:
        lowest = m.min_entry()
        return Fraction(0) if lowest > 0 else Fraction(ceil(abs(lowest)) + 1)

    s1, s2 = shift_for(game.a), shift_for(game.b)
    return BimatrixGame(game.a.shift(s1), game.b.shift(s2)), s1, s2

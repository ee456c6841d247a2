import random
from fractions import Fraction

import pytest

from rankgames.algorithms import (
    HALF_SPACE,
    SLAB,
    TWO_HYPERPLANE_UNION,
    bin_search,
    enumerate_general,
    enumerate_rank1,
    fixed_point_record,
    fixed_point_search,
    homeo_forward,
    homeo_inverse,
    homeo_k_forward,
    region_graph,
    solve_general,
)
from rankgames.errors import DegeneracyError, NotEquilibrium, RankGamesError
from rankgames.games import (
    BimatrixGame,
    MixedProfile,
    Rank1Decomposition,
    decompose_rank1,
    decompose_rank_k,
    verify_equilibrium,
)
from rankgames.labeledpath import trace_path
from rankgames.linalg import Matrix, vdot
from rankgames.oracle import support_enumeration, zero_sum_solve
from rankgames.paramlp import fixed_point_eval
from rankgames.polytope import GameFamily, RankKFamily

from fixtures import (
    EX1_A,
    EX1_BETA,
    EX1_C,
    K2_GAME,
    MATCHING_PENNIES,
    R1A,
    R1A_NE_X,
    R1A_NE_Y,
    R1B,
    R1B_NE_KEYS,
    ex1_family,
    nondegenerate_rank1_fixtures,
    random_general_games,
)


def keys(records):
    return sorted((r.profile.x, r.profile.y) for r in records)


# ---------------------------------------------------------------- bin_search


def test_bin_search_r1a_matches_oracle():
    report = bin_search(R1A)
    rec = report.equilibrium
    assert rec.profile.x == R1A_NE_X
    assert rec.profile.y == R1A_NE_Y
    assert rec.index == 1
    assert verify_equilibrium(R1A.game(), rec.profile)
    assert report.iterations <= report.bound_k + 1


def test_bin_search_zero_sum_matches_lp_value():
    a = Matrix([[3, -1], [-2, 2]])
    d = Rank1Decomposition(a, (0, 0), (1, 2))
    report = bin_search(d)
    lp_rec = zero_sum_solve(a)
    assert report.equilibrium.payoff1 == lp_rec.payoff1 == Fraction(1, 2)
    assert verify_equilibrium(BimatrixGame(a, -a), report.equilibrium.profile)


def test_bin_search_single_column_game():
    d = decompose_rank1(BimatrixGame(Matrix([[3]]), Matrix([[-1]])), beta_default=(1,))
    report = bin_search(d)
    assert report.equilibrium.profile.x == (1,)
    assert report.equilibrium.profile.y == (1,)


def test_bin_search_constant_beta_reduces_to_zero_sum():
    a = Matrix([[1, 0], [0, 1]])
    d = Rank1Decomposition(a, (1, 1), (1, 1))
    report = bin_search(d)
    assert report.equilibrium.profile.x == (Fraction(1, 2), Fraction(1, 2))
    assert report.equilibrium.profile.y == (Fraction(1, 2), Fraction(1, 2))
    assert verify_equilibrium(d.game(), report.equilibrium.profile)


def test_bin_search_matching_pennies_through_decomposition():
    d = decompose_rank1(MATCHING_PENNIES)
    report = bin_search(d)
    assert report.equilibrium.profile.x == (Fraction(1, 2), Fraction(1, 2))
    assert report.equilibrium.index == 1


def test_bin_search_iteration_bound_on_random_fixtures():
    fixtures = nondegenerate_rank1_fixtures(
        seed=101, count=50, min_mn=2, max_mn=4, pipeline=bin_search
    )
    for d in fixtures:
        report = bin_search(d)
        assert report.iterations <= report.bound_k + 1
        assert report.equilibrium.index == 1
        assert verify_equilibrium(d.game(), report.equilibrium.profile)
        for a1, a2 in report.history:
            assert a1 < a2


# --------------------------------------------------------------- enumeration


def test_enumerate_r1b_full_set_and_indices():
    recs = enumerate_rank1(R1B)
    assert keys(recs) == sorted(R1B_NE_KEYS)
    assert len(recs) % 2 == 1
    assert sum(r.index for r in recs) == 1
    assert recs[0].index == 1  # first along the path
    assert [r.index for r in recs] == [1, -1, 1]  # alternation in path order
    oracle = support_enumeration(R1B.game())
    assert keys(recs) == keys(oracle.equilibria)


def test_enumerate_unique_equilibrium_game():
    recs = enumerate_rank1(R1A)
    assert len(recs) == 1
    assert recs[0].index == 1


def test_enumerate_general_ex1_game_proper_subset_of_oracle():
    # The all-ones row weights sit in the family's cycle component, so the
    # path walk returns a strict (odd) subset of the oracle set.
    game = BimatrixGame(EX1_A, EX1_C + Matrix.outer((0, 1, 1), EX1_BETA))
    recs = enumerate_general(game, beta=EX1_BETA)
    oracle = support_enumeration(game)
    oracle_keys = set(keys(oracle.equilibria))
    assert len(recs) == 3 and len(oracle_keys) == 5
    assert len(recs) % 2 == 1  # the path crosses an odd number of times
    for rec in recs:
        assert (rec.profile.x, rec.profile.y) in oracle_keys


def test_enumerate_general_ex1_unit_gamma_is_degenerate():
    # With unit row weights the hyperplane passes exactly through a node of
    # the fully-labeled set; the policy is to refuse rather than emit.
    game = BimatrixGame(EX1_A, EX1_C + Matrix.outer((1, 1, 1), EX1_BETA))
    with pytest.raises(DegeneracyError):
        enumerate_general(game, beta=EX1_BETA)


def test_solve_general_matching_pennies():
    rec = solve_general(MATCHING_PENNIES)
    assert rec.profile.x == (Fraction(1, 2), Fraction(1, 2))
    assert rec.profile.y == (Fraction(1, 2), Fraction(1, 2))


def test_solve_general_membership_in_oracle_set():
    games = random_general_games(seed=40, count=10, pipeline=solve_general)
    for game in games:
        rec = solve_general(game)
        oracle_keys = set(keys(support_enumeration(game).equilibria))
        assert (rec.profile.x, rec.profile.y) in oracle_keys
        assert verify_equilibrium(game, rec.profile)


def test_solve_general_degenerate_raises():
    # Identical rows of A make the row polytope degenerate.
    game = BimatrixGame(Matrix([[1, 2], [1, 2]]), Matrix([[0, 1], [3, 1]]))
    with pytest.raises(DegeneracyError):
        solve_general(game)


# -------------------------------------------------------------------- index


def test_index_cross_check_runs_on_every_r1b_equilibrium():
    # enumerate_rank1 raises IndexMismatch internally if the two index
    # computations ever disagree; reaching here means they agreed.
    recs = enumerate_rank1(R1B)
    assert all(r.index in (1, -1) for r in recs)


def test_pure_equilibrium_of_positive_game_has_index_one():
    game = BimatrixGame(Matrix([[2, 2], [0, 0]]), Matrix([[1, 0], [0, 0]]))
    d = decompose_rank_k(game)  # not rank-1; use the general path
    recs = enumerate_general(game)
    pure = [r for r in recs if r.support == ((1,), (1,))]
    assert pure and pure[0].index == 1


# ----------------------------------------------------------- homeomorphisms


@pytest.fixture(scope="module")
def r1a_family():
    return GameFamily(R1A.a, R1A.a.scale(-1), R1A.beta)


@pytest.fixture(scope="module")
def r1a_trace(r1a_family):
    return trace_path(r1a_family)


def test_homeo_forward_single_row():
    # m = 1: the image is the single value beta . y + alpha_1.
    a = Matrix([[1, 3]])
    fam = GameFamily(a, a.scale(-1), (1, 2))
    alpha = (Fraction(5),)
    # G(5) pays the column player -a + 5*beta = (4, 7): pure second column.
    profile = MixedProfile((Fraction(1),), (Fraction(0), Fraction(1)))
    out = homeo_forward(fam, alpha, profile)
    assert out == (vdot(fam.beta, profile.y) + 5,)
    assert out == (Fraction(7),)


def test_homeo_forward_requires_equilibrium(r1a_family):
    bad = MixedProfile((1, 0, 0), (1, 0, 0))
    with pytest.raises(NotEquilibrium):
        homeo_forward(r1a_family, R1A.gamma, bad)


def test_homeo_forward_direct_substitution(r1a_family):
    profile = MixedProfile(R1A_NE_X, R1A_NE_Y)
    out = homeo_forward(r1a_family, R1A.gamma, profile)
    g1 = vdot(R1A.beta, R1A_NE_Y) + vdot(R1A.gamma, R1A_NE_X)
    assert out == (g1, R1A.gamma[1] - R1A.gamma[0], R1A.gamma[2] - R1A.gamma[0])


def test_homeo_round_trip_exact(r1a_family, r1a_trace):
    rng = random.Random(23)
    for _ in range(20):
        alpha_prime = tuple(
            Fraction(rng.randint(-500, 500), rng.randint(1, 60)) for _ in range(3)
        )
        alpha, profile = homeo_inverse(r1a_family, alpha_prime, r1a_trace)
        assert homeo_forward(r1a_family, alpha, profile) == alpha_prime


def test_homeo_inverse_low_values_sit_on_low_ray(r1a_family, r1a_trace):
    sd = r1a_family.start
    alpha_prime = (Fraction(-1000), Fraction(0), Fraction(0))
    alpha, profile = homeo_inverse(r1a_family, alpha_prime, r1a_trace)
    expected_x = [Fraction(0)] * 3
    expected_x[sd.i_s - 1] = Fraction(1)
    assert list(profile.x) == expected_x
    assert homeo_forward(r1a_family, alpha, profile) == alpha_prime


def test_homeo_k_forward_specializes_to_rank1(r1a_family):
    kfam = RankKFamily(R1A.a, [R1A.beta])
    profile = MixedProfile(R1A_NE_X, R1A_NE_Y)
    single = homeo_forward(r1a_family, R1A.gamma, profile)
    ktuple = homeo_k_forward(kfam, [R1A.gamma], profile)
    assert ktuple == (single,)


def test_homeo_k_forward_on_k2_and_g_distinctness():
    # The rank-2 fixture is a degenerate game (unbalanced-support equilibria),
    # so its equilibrium is verified directly rather than taken from the
    # equal-support oracle.
    d = decompose_rank_k(K2_GAME)
    kfam = RankKFamily(d.a, d.betas)
    profile = MixedProfile((0, 1, 0), (Fraction(1, 2), 0, Fraction(1, 2)))
    assert verify_equilibrium(K2_GAME, profile)
    out = homeo_k_forward(kfam, d.gammas, profile)
    for l in range(d.k):
        lam = vdot(d.gammas[l], profile.x)
        assert out[l][0] == lam + vdot(d.betas[l], profile.y)
        assert out[l][1:] == tuple(
            d.gammas[l][i] - d.gammas[l][0] for i in range(1, kfam.m)
        )
    # Distinctness of the leading coordinates across different games' equilibria.
    alphas2 = tuple(
        tuple(g + 1 for g in gamma) for gamma in d.gammas
    )
    rec2 = support_enumeration(kfam.game_at(alphas2)).equilibria[0]
    out2 = homeo_k_forward(kfam, alphas2, rec2.profile)
    assert tuple(o[0] for o in out) != tuple(o2[0] for o2 in out2)


# ----------------------------------------------------------- fixed points


def test_fixed_point_search_rank1_matches_bin_search():
    kfam = RankKFamily(R1A.a, [R1A.beta])
    point = fixed_point_search(kfam, [R1A.gamma], tol=Fraction(1, 1000), max_iters=40)
    assert point is not None
    fa = fixed_point_eval(kfam, [R1A.gamma], point)
    assert fa == point  # exact fixed point
    rec = fixed_point_record(kfam, [R1A.gamma], point)
    report = bin_search(R1A)
    assert rec.profile == report.equilibrium.profile


def test_fixed_point_search_accepts_given_fixed_point():
    kfam = RankKFamily(R1A.a, [R1A.beta])
    lam = vdot(R1A.gamma, R1A_NE_X)
    point = fixed_point_search(
        kfam, [R1A.gamma], tol=Fraction(1, 1000), max_iters=5, start=(lam,)
    )
    assert point == (lam,)


def test_fixed_point_search_k2():
    d = decompose_rank_k(K2_GAME)
    kfam = RankKFamily(d.a, d.betas)
    point = fixed_point_search(kfam, d.gammas, tol=Fraction(1, 1000), max_iters=40)
    assert point is not None
    fa = fixed_point_eval(kfam, d.gammas, point)
    residual = max(abs(f - x) for f, x in zip(fa, point))
    assert residual <= Fraction(1, 1000)
    if residual == 0:
        rec = fixed_point_record(kfam, d.gammas, point)
        assert verify_equilibrium(K2_GAME, rec.profile)


# ---------------------------------------------------------------- regions


def test_region_graph_worked_example():
    fam = ex1_family()
    graph = region_graph(fam, trace_path(fam))
    assert graph.kind == "path"
    assert len(graph.regions) == 3
    assert graph.regions[0].kind == HALF_SPACE
    assert graph.regions[-1].kind == HALF_SPACE
    assert len(graph.regions[0].hyperplanes) == 1
    assert len(graph.regions[-1].hyperplanes) == 1
    middle = graph.regions[1]
    assert middle.kind == TWO_HYPERPLANE_UNION  # |I| = 2 at the interior vertex
    assert len(middle.hyperplanes) == 2
    assert graph.degree(0) == 1 and graph.degree(1) == 2 and graph.degree(2) == 1


def test_region_graph_slab_kind_exists():
    # A path with a singleton-support interior vertex yields parallel planes.
    a = Matrix([[-2, -7, -8], [7, 3, 8], [0, -5, 0]])
    fam = GameFamily(a, a.scale(-1), (4, 3, 2))
    graph = region_graph(fam, trace_path(fam))
    slabs = [r for r in graph.regions if r.kind == SLAB]
    assert slabs
    for reg in slabs:
        h1, h2 = reg.hyperplanes
        assert h1.coeffs == h2.coeffs  # parallel: same x coefficients
        assert h1.offset != h2.offset


def test_region_graph_sampling_recovers_vertex():
    fam = GameFamily(R1A.a, R1A.a.scale(-1), R1A.beta)
    graph = region_graph(fam, trace_path(fam))
    rng = random.Random(9)
    checked = 0
    for reg in graph.regions:
        if reg.kind != SLAB and reg.kind != TWO_HYPERPLANE_UNION:
            continue
        h1, h2 = reg.hyperplanes
        # a point on a hyperplane strictly between the two bounding ones
        mid_offset = (h1.offset + h2.offset) / 2
        coeffs = tuple((c1 + c2) / 2 for c1, c2 in zip(h1.coeffs, h2.coeffs))
        support = [i for i, c in enumerate(coeffs) if c > 0]
        if not support:
            continue
        i0 = support[0]
        alpha = [Fraction(0)] * fam.m
        alpha[i0] = mid_offset / coeffs[i0]
        try:
            recs = enumerate_general(fam.game_at(alpha), beta=R1A.beta)
        except (DegeneracyError, RankGamesError):
            continue
        y_vertex = reg.vertex.coords[: fam.n]
        assert any(rec.profile.y == y_vertex for rec in recs)
        checked += 1
    assert checked >= 1

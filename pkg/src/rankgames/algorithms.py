"""Top-level solving procedures built on the path machinery.

Binary search and full enumeration for rank-1 games, a path-following solver
for arbitrary bimatrix games, equilibrium indices with a built-in cross-check,
the forward/inverse homeomorphism maps, the rank-k fixed-point search, and
game-space region extraction.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, replace
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from .errors import (
    DegeneratePolytope,
    IndexMismatch,
    IterationCapExceeded,
    NotEquilibrium,
    RankGamesError,
    StepBudgetExceeded,
)
from .games import (
    BimatrixGame,
    EquilibriumRecord,
    GeneralDecomposition,
    MixedProfile,
    Rank1Decomposition,
    default_beta,
    integerize,
    make_record,
    positivity_shift,
    reduce_constant_beta,
    verify_equilibrium,
)
from .labeledpath import (
    BACKWARD,
    FORWARD,
    V_FIXED,
    ComponentTrace,
    PathEdge,
    g_value,
    make_node,
    step,
    step_budget,
    trace_path,
)
from .linalg import (
    Matrix,
    Rat,
    Vec,
    determinant,
    frac,
    solve_linear_system,
    vdot,
    vector,
    vsub,
)
from .paramlp import (
    Crossing,
    FoundEquilibrium,
    box_bounds,
    crossing_records,
    fixed_point_eval,
    is_ne,
    solve_lp_delta,
    solve_lp_k,
)
from .polytope import GameFamily, RankKFamily, Vertex


@dataclass(frozen=True)
class BinSearchReport:
    equilibrium: EquilibriumRecord
    iterations: int  # midpoint probes inside the loop
    bound_k: int  # proven iteration bound for the integerized instance
    history: tuple[tuple[Rat, Rat], ...]  # (a1, a2) after each loop step
    bit_length: int  # total bit size of the integerized instance (diagnostic)


def _sign(x: Rat) -> int:
    return (x > 0) - (x < 0)


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def _trivial_single_column(game: BimatrixGame, provenance: str) -> EquilibriumRecord:
    """n = 1: the column player is fixed; the row player picks the best row."""
    col = game.a.col(0)
    best = max(col)
    rows = [i for i, v in enumerate(col) if v == best]
    if len(rows) > 1:
        raise DegeneratePolytope("tied best rows in a single-column game")
    x = [Fraction(0)] * game.m
    x[rows[0]] = Fraction(1)
    profile = MixedProfile(tuple(x), (Fraction(1),))
    return make_record(game, profile, provenance, index=1)


def _instance_bits(d: Rank1Decomposition) -> int:
    entries = list(d.a.entries()) + list(d.gamma) + list(d.beta)
    return sum(abs(int(e)).bit_length() + 1 for e in entries)


def index_of(game_positive: BimatrixGame, rec: EquilibriumRecord, crossing: Crossing) -> int:
    """Equilibrium index; asserts the determinant and orientation routes agree.

    The determinant formula (-1)^(|I|+1) * sign(det A_I^J * det B_I^J) needs a
    strictly positive game; the orientation value comes from which side of the
    hyperplane the directed edge enters from.
    """
    if game_positive.a.min_entry() <= 0 or game_positive.b.min_entry() <= 0:
        raise RankGamesError("index formula requires strictly positive payoffs")
    big_i, big_j = rec.support
    if len(big_i) != len(big_j):
        raise DegeneratePolytope("unbalanced support at an equilibrium")
    rows = [i - 1 for i in big_i]
    cols = [j - 1 for j in big_j]
    det_a = determinant(game_positive.a.submatrix(rows, cols))
    det_b = determinant(game_positive.b.submatrix(rows, cols))
    det_index = (-1) ** (len(big_i) + 1) * _sign(det_a * det_b)
    if det_index == 0:
        raise DegeneratePolytope("singular support submatrix")
    if det_index != crossing.orient_index:
        raise IndexMismatch(
            f"determinant index {det_index} != orientation index {crossing.orient_index}"
        )
    return det_index


def _finalize(
    original: BimatrixGame,
    found: FoundEquilibrium,
    provenance: str,
    shifted: Optional[BimatrixGame] = None,
) -> EquilibriumRecord:
    """Re-anchor a found equilibrium on the original game and fix its index."""
    rec = make_record(original, found.record.profile, provenance)
    if shifted is None:
        shifted = positivity_shift(original)[0]
    return replace(rec, index=index_of(shifted, rec, found.crossing))


def bin_search(d: Rank1Decomposition, _depth: int = 0) -> BinSearchReport:
    """Binary search on the path's lambda coordinate for one equilibrium.

    Works on the integerized copy (equilibria are scale-invariant); the
    iteration cap comes from the vertex-denominator bound. Constant beta is
    reduced away first, constant gamma short-circuits to a single probe.
    """
    game = d.game()
    if game.n == 1:
        rec = _trivial_single_column(game, "bin-search")
        return BinSearchReport(rec, 0, 0, (), _instance_bits(integerize(d)[0]))
    if all(b == d.beta[0] for b in d.beta):
        if _depth > 0:
            raise RankGamesError("constant beta survived reduction")
        zero_sum = reduce_constant_beta(d)
        d2 = Rank1Decomposition(
            zero_sum.a, vector([0] * game.m), default_beta(game.n)
        )
        report = bin_search(d2, _depth + 1)
        rec = make_record(game, report.equilibrium.profile, "bin-search")
        return replace(report, equilibrium=replace(rec, index=report.equilibrium.index))

    di, _scale = integerize(d)
    family = GameFamily(di.a, di.a.scale(-1), di.beta)
    gamma = di.gamma
    g_min, g_max = min(gamma), max(gamma)
    bits = _instance_bits(di)
    shifted = positivity_shift(game)[0]

    def report_for(found: FoundEquilibrium, iters: int, bound: int, hist) -> BinSearchReport:
        if found.crossing.orient_index != 1:
            raise IndexMismatch("binary search landed on a negatively indexed crossing")
        rec = _finalize(game, found, "bin-search", shifted)
        return BinSearchReport(rec, iters, bound, tuple(hist), bits)

    if g_min == g_max:
        out = is_ne(family, gamma, g_min)
        if out.kind != "found":
            raise RankGamesError("constant-gamma probe missed the forced equilibrium")
        return report_for(out.found[0], 0, 0, ())

    b_max = max(di.a.max_abs(), max(abs(b) for b in di.beta), max(abs(g) for g in gamma))
    delta_bound = factorial(game.m + 2) * int(b_max) ** (game.m + 2)
    bound_k = _ceil_log2(delta_bound * delta_bound * int(g_max - g_min))

    low = is_ne(family, gamma, g_min)
    if low.kind == "found":
        return report_for(low.found[0], 0, bound_k, ())
    if low.kind != "below":
        raise RankGamesError("low probe is not on the low side of the hyperplane")
    high = is_ne(family, gamma, g_max)
    if high.kind == "found":
        return report_for(high.found[0], 0, bound_k, ())
    if high.kind != "above":
        raise RankGamesError("high probe is not on the high side of the hyperplane")

    a1, a2 = g_min, g_max
    history: list[tuple[Rat, Rat]] = []
    for it in range(1, bound_k + 2):
        a = (a1 + a2) / 2
        out = is_ne(family, gamma, a)
        if out.kind == "found":
            return report_for(out.found[0], it, bound_k, history)
        if out.kind == "below":
            a1 = a
        else:
            a2 = a
        history.append((a1, a2))
    raise IterationCapExceeded(f"no equilibrium within {bound_k + 1} probes")


def enumeration(
    family: GameFamily,
    gamma: Sequence[Fraction],
    start: PathEdge,
    end: PathEdge,
    provenance: str = "enumeration",
) -> list[FoundEquilibrium]:
    """Walk the oriented path from start to end, collecting hyperplane hits."""
    gamma = vector(gamma)
    found: list[FoundEquilibrium] = []
    budget = step_budget(family.m, family.n)
    edge = start
    steps = 0
    while True:
        found.extend(crossing_records(family, gamma, edge, provenance))
        if edge.key() == end.key():
            return found
        if edge.head is None:
            raise RankGamesError("walk ran off the path before the end edge")
        edge, _far = step(family, edge.head, "P" if edge.head.sign > 0 else "Q")
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(f"more than {budget} edges walked")


def path_extreme_edges(family: GameFamily) -> tuple[PathEdge, PathEdge]:
    """The two unbounded path edges, oriented low-ray first."""
    u0 = make_node(family, family.v_s(), family.w_start())
    if u0.sign != 1:
        raise RankGamesError("low-ray node sign is not +1")
    ray0 = family.qp.pivot(family.w_start(), u0.duplicate)
    if not ray0.unbounded:
        raise RankGamesError("low ray is bounded")
    start = PathEdge(V_FIXED, family.v_s(), ray0, None, u0, BACKWARD)
    u1 = make_node(family, family.v_e(), family.w_end())
    if u1.sign != -1:
        raise RankGamesError("high-ray node sign is not -1")
    ray1 = family.qp.pivot(family.w_end(), u1.duplicate)
    if not ray1.unbounded:
        raise RankGamesError("high ray is bounded")
    end = PathEdge(V_FIXED, family.v_e(), ray1, u1, None, FORWARD)
    return start, end


def enumerate_rank1(d: Rank1Decomposition, _depth: int = 0) -> list[EquilibriumRecord]:
    """All equilibria of a rank-1 game, in path order, with indices attached."""
    game = d.game()
    if game.n == 1:
        return [_trivial_single_column(game, "enumeration")]
    if all(b == d.beta[0] for b in d.beta):
        if _depth > 0:
            raise RankGamesError("constant beta survived reduction")
        zero_sum = reduce_constant_beta(d)
        d2 = Rank1Decomposition(zero_sum.a, vector([0] * game.m), default_beta(game.n))
        recs = enumerate_rank1(d2, _depth + 1)
        return [
            replace(make_record(game, r.profile, "enumeration"), index=r.index)
            for r in recs
        ]
    family = GameFamily(d.a, d.a.scale(-1), d.beta)
    g_min, g_max = min(d.gamma), max(d.gamma)
    start = solve_lp_delta(family, g_min).edge
    end = solve_lp_delta(family, g_max).edge
    founds = enumeration(family, d.gamma, start, end)
    shifted = positivity_shift(game)[0]
    return [_finalize(game, fe, "enumeration", shifted) for fe in founds]


def general_embedding(
    game: BimatrixGame, beta: Optional[Sequence[Fraction]] = None
) -> GeneralDecomposition:
    """Embed an arbitrary game with c = b and zero row weights."""
    beta_vec = vector(beta) if beta is not None else default_beta(game.n)
    return GeneralDecomposition(game.a, game.b, vector([0] * game.m), beta_vec)


def enumerate_general(
    game: BimatrixGame, beta: Optional[Sequence[Fraction]] = None
) -> list[EquilibriumRecord]:
    """Equilibria found on the full path of the general embedding.

    Complete for rank-1 inputs; for larger rank at least one equilibrium is
    guaranteed (equilibria on cycle components are not visited).
    """
    if game.n == 1:
        return [_trivial_single_column(game, "general-path")]
    d = general_embedding(game, beta)
    family = GameFamily(d.a, d.c, d.beta)
    start, end = path_extreme_edges(family)
    founds = enumeration(family, d.gamma, start, end, provenance="general-path")
    if not founds:
        raise RankGamesError("path walk found no equilibrium; theory guarantees one")
    shifted = positivity_shift(game)[0]
    return [_finalize(game, fe, "general-path", shifted) for fe in founds]


def solve_general(
    game: BimatrixGame, beta: Optional[Sequence[Fraction]] = None
) -> EquilibriumRecord:
    """One verified equilibrium of an arbitrary bimatrix game (first path hit)."""
    return enumerate_general(game, beta)[0]


def homeo_forward(family: GameFamily, alpha: Sequence[Fraction], profile: MixedProfile) -> Vec:
    """Game-space image of a verified equilibrium point of the rank-1 family."""
    if not family.rank1:
        raise RankGamesError("homeomorphism maps are defined on rank-1 families")
    alpha = vector(alpha)
    if not verify_equilibrium(family.game_at(alpha), profile):
        raise NotEquilibrium("profile is not an equilibrium of the alpha game")
    first = vdot(family.beta, profile.y) + vdot(alpha, profile.x)
    return (first,) + tuple(alpha[i] - alpha[0] for i in range(1, len(alpha)))


def _edge_g_linear(family: GameFamily, edge: PathEdge) -> tuple[Rat, Rat]:
    """(g0, dg) of the path coordinate along the edge parameter."""
    m, n = family.m, family.n
    d = edge.moving.direction
    if edge.kind == V_FIXED:
        g0 = vdot(family.beta, edge.fixed.coords[:n]) + edge.moving.base.coords[m]
        return g0, d[m]
    g0 = vdot(family.beta, edge.moving.base.coords[:n]) + edge.fixed.coords[m]
    return g0, vdot(family.beta, d[:n])


def homeo_inverse(
    family: GameFamily, alpha_prime: Sequence[Fraction], trace: Optional[ComponentTrace] = None
) -> tuple[Vec, MixedProfile]:
    """Unique equilibrium point mapping to the given game-space vector.

    Locates the path point whose coordinate matches the first component by
    bisection over the strictly increasing node values, solves the remaining
    affine system for the row weights, and verifies the result exactly.
    """
    if not family.rank1:
        raise RankGamesError("homeomorphism maps are defined on rank-1 families")
    alpha_prime = vector(alpha_prime)
    target = alpha_prime[0]
    if trace is None:
        trace = trace_path(family)
    gs = [g_value(family, u) for u in trace.nodes]
    if any(b <= a for a, b in zip(gs, gs[1:])):
        raise RankGamesError("path coordinate is not strictly increasing")

    pos = bisect_left(gs, target)
    if pos < len(gs) and gs[pos] == target:
        node = trace.nodes[pos]
        v_coords, w_coords = node.v.coords, node.w.coords
    else:
        edge = trace.edges[pos]
        g0, dg = _edge_g_linear(family, edge)
        if dg == 0:
            raise RankGamesError("path coordinate is constant on a located edge")
        t_star = (target - g0) / dg
        if t_star < 0 or (edge.moving.t_max is not None and t_star > edge.moving.t_max):
            raise RankGamesError("located edge does not span the requested value")
        if edge.kind == V_FIXED:
            v_coords = edge.fixed.coords
            w_coords = edge.moving.point_at(t_star)
        else:
            v_coords = edge.moving.point_at(t_star)
            w_coords = edge.fixed.coords

    x = w_coords[: family.m]
    y = v_coords[: family.n]
    a1 = target - vdot(family.beta, y) - sum(
        (x[i] * alpha_prime[i] for i in range(1, family.m)), Fraction(0)
    )
    alpha = (a1,) + tuple(alpha_prime[i] + a1 for i in range(1, family.m))
    profile = MixedProfile(x, y)
    if not verify_equilibrium(family.game_at(alpha), profile):
        raise NotEquilibrium("inverse map produced a non-equilibrium (degenerate input?)")
    return alpha, profile


def homeo_k_forward(
    kfam: RankKFamily,
    alphas: Sequence[Sequence[Fraction]],
    profile: MixedProfile,
) -> tuple[Vec, ...]:
    """Rank-k forward map: one game-space vector per scaling direction."""
    alphas = tuple(vector(al) for al in alphas)
    if not verify_equilibrium(kfam.game_at(alphas), profile):
        raise NotEquilibrium("profile is not an equilibrium of the alpha game")
    out = []
    for al, beta in zip(alphas, kfam.betas):
        lam = vdot(al, profile.x)
        first = lam + vdot(beta, profile.y)
        out.append((first,) + tuple(al[i] - al[0] for i in range(1, len(al))))
    return tuple(out)


def fixed_point_record(
    kfam: RankKFamily, gammas: Sequence[Sequence[Fraction]], a: Sequence[Fraction]
) -> EquilibriumRecord:
    """Convert an exact fixed point into a verified equilibrium record."""
    gammas = tuple(vector(g) for g in gammas)
    opt = solve_lp_k(kfam, vector(a), check_unique=False)
    profile = MixedProfile(opt.w_coords[: kfam.m], opt.v_coords[: kfam.n])
    game = kfam.game_at(gammas)
    if not verify_equilibrium(game, profile):
        raise NotEquilibrium("exact fixed point failed equilibrium verification")
    return make_record(game, profile, "fixed-point")


def fixed_point_search(
    kfam: RankKFamily,
    gammas: Sequence[Sequence[Fraction]],
    tol: Rat = Fraction(1, 1000),
    max_iters: int = 60,
    start: Optional[Sequence[Fraction]] = None,
) -> Optional[Vec]:
    """Heuristic fixed-point search on the box (experimental).

    Damped iteration from the box center with an exact per-piece affine solve
    at every step, then a coarse grid restart. No convergence guarantee is
    claimed; a returned point has residual at most tol, and an exact fixed
    point is verified as an equilibrium before being returned.
    """
    gammas = tuple(vector(g) for g in gammas)
    tol = frac(tol)
    lows, highs = box_bounds(gammas)
    k = kfam.k

    def evaluate(a: Vec) -> Vec:
        return fixed_point_eval(kfam, gammas, a)

    def residual(a: Vec, fa: Vec) -> Rat:
        return max(abs(f - x) for f, x in zip(fa, a))

    def in_box(a: Vec) -> bool:
        return all(lo <= x <= hi for x, lo, hi in zip(a, lows, highs))

    def local_solve(a: Vec, fa: Vec) -> Optional[Vec]:
        # Probe the affine piece around a; solve z = f(z) inside it.
        eps = max(hi - lo for lo, hi in zip(lows, highs)) / 4096
        if eps == 0:
            return None
        cols = []
        for l in range(k):
            room_up = highs[l] - a[l]
            room_dn = a[l] - lows[l]
            step_l = min(eps, room_up) if room_up >= room_dn else -min(eps, room_dn)
            if step_l == 0:
                cols.append([Fraction(0)] * k)
                continue
            probe = list(a)
            probe[l] += step_l
            fp = evaluate(tuple(probe))
            cols.append([(fp[i] - fa[i]) / step_l for i in range(k)])
        jac = Matrix(cols).transpose()
        system = Matrix.identity(k) - jac
        rhs = vsub(fa, jac.mul_vec(a))
        try:
            z = solve_linear_system(system, rhs)
        except Exception:
            return None
        if not in_box(z):
            return None
        if evaluate(z) == z:
            return z
        return None

    def damped(a: Vec, iters: int) -> tuple[Rat, Vec, Optional[Vec]]:
        best_r: Optional[Rat] = None
        best_a = a
        for _ in range(iters):
            fa = evaluate(a)
            r = residual(a, fa)
            if best_r is None or r < best_r:
                best_r, best_a = r, a
            if r == 0:
                return Fraction(0), a, a
            exact = local_solve(a, fa)
            if exact is not None:
                return Fraction(0), exact, exact
            a = tuple((x + f) / 2 for x, f in zip(a, fa))
        return best_r, best_a, None

    start_pt = vector(start) if start is not None else tuple(
        (lo + hi) / 2 for lo, hi in zip(lows, highs)
    )
    if not in_box(start_pt):
        raise RankGamesError("start point lies outside the box")
    best_r, best_a, exact = damped(start_pt, max_iters)
    if exact is not None:
        fixed_point_record(kfam, gammas, exact)
        return exact
    if best_r <= tol:
        return best_a
    # Grid restart: pick the best of a coarse lattice and iterate again.
    grid_pts: list[Vec] = [()]
    for lo, hi in zip(lows, highs):
        span = hi - lo
        axis = [lo + span * i / 4 for i in range(5)] if span > 0 else [lo]
        grid_pts = [p + (v,) for p in grid_pts for v in axis]
    scored = []
    for p in grid_pts:
        fp = evaluate(p)
        scored.append((residual(p, fp), p))
    scored.sort()
    _, seed = scored[0]
    r2, a2, exact2 = damped(seed, max_iters)
    if exact2 is not None:
        fixed_point_record(kfam, gammas, exact2)
        return exact2
    if min(best_r, r2) <= tol:
        return a2 if r2 <= best_r else best_a
    return None


HALF_SPACE = "half_space"
SLAB = "slab"
TWO_HYPERPLANE_UNION = "two_hyperplane_union"


@dataclass(frozen=True)
class RegionHyperplane:
    """Game-space hyperplane sum_i coeffs_i * alpha_i = offset."""

    coeffs: Vec
    offset: Rat


@dataclass(frozen=True)
class Region:
    vertex: Vertex  # row-polytope vertex owning the region
    hyperplanes: tuple[RegionHyperplane, ...]
    kind: str
    support_size: int


@dataclass(frozen=True)
class RegionGraph:
    regions: tuple[Region, ...]
    kind: str  # inherited from the trace: "path" | "cycle"

    def degree(self, idx: int) -> int:
        if self.kind == "cycle":
            return 2
        return sum(1 for j in (idx - 1, idx + 1) if 0 <= j < len(self.regions))


def region_graph(family: GameFamily, trace: ComponentTrace) -> RegionGraph:
    """Game-space regions of the traced component, in traversal order.

    Each row-polytope vertex owns a region bounded by the hyperplanes of the
    bounding lifted vertices of its edge: one hyperplane on the two rays, two
    parallel ones for singleton supports, two general ones otherwise.
    """
    m = family.m
    regions: list[Region] = []
    for edge in trace.edges:
        if edge.kind != V_FIXED:
            continue
        v = edge.fixed
        bounding = [edge.moving.base]
        if edge.moving.far_end is not None:
            bounding.append(edge.moving.far_end)
        planes = tuple(
            RegionHyperplane(w.coords[:m], w.coords[m])
            for w in sorted(bounding, key=lambda w: w.coords[m])
        )
        support_size = sum(1 for lab in v.labels if lab <= m)
        if len(planes) == 1:
            kind = HALF_SPACE
        elif support_size == 1:
            kind = SLAB
        else:
            kind = TWO_HYPERPLANE_UNION
        regions.append(Region(v, planes, kind, support_size))
    return RegionGraph(tuple(regions), trace.kind)

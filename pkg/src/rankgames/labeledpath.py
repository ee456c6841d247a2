"""Fully-labeled vertex pairs, their signs, and alternating path traversal.

A node pairs a vertex of the row polytope with a vertex of the lifted column
polytope so that together they carry every label 1..m+n; exactly one label is
shared (the duplicate). Relaxing the duplicate on either side yields the two
incident edges, so the pairs form paths and cycles. Node signs come from the
determinants of the two tight-constraint systems and orient the traversal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional

from .errors import (
    DegeneratePolytope,
    MultipleDuplicates,
    NotFullyLabeled,
    RankGamesError,
    StepBudgetExceeded,
)
from .linalg import Matrix, Rat, determinant, vdot
from .polytope import EdgeDescriptor, GameFamily, Vertex

V_FIXED = "v_fixed"  # vertex of P fixed, edge moves in Q'
W_FIXED = "w_fixed"  # vertex of Q' fixed, edge moves in P
FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class PathNode:
    v: Vertex
    w: Vertex
    duplicate: int
    sign: int

    def key(self) -> tuple[frozenset[int], frozenset[int]]:
        return (self.v.basis, self.w.basis)


@dataclass(frozen=True)
class PathEdge:
    """Oriented edge of the fully-labeled set.

    ``moving`` parametrizes the non-fixed side from its base vertex; ``tail``
    and ``head`` are the endpoint nodes in orientation order (None marks the
    open end of an unbounded edge). ``direction`` records whether increasing
    edge parameter runs tail-to-head (forward) or head-to-tail (backward).
    """

    kind: str
    fixed: Vertex
    moving: EdgeDescriptor
    tail: Optional[PathNode]
    head: Optional[PathNode]
    direction: str

    def key(self) -> tuple[str, frozenset[int], frozenset[int]]:
        return (self.kind, self.fixed.basis, self.moving.tight_set)

    def end_parameters(self) -> tuple[Optional[Rat], Optional[Rat]]:
        """(t_tail, t_head); None stands for the infinite end."""
        if self.direction == FORWARD:
            return Fraction(0), self.moving.t_max
        return self.moving.t_max, Fraction(0)


@dataclass(frozen=True)
class ComponentTrace:
    kind: str  # "path" | "cycle"
    nodes: tuple[PathNode, ...]
    edges: tuple[PathEdge, ...]


def step_budget(m: int, n: int) -> int:
    """Hard cap exceeding the number of vertex pairs; crossing it is a bug."""
    return comb(m + n, n) * comb(m + n + 1, m + 1)


def _sign(x: Rat) -> int:
    return (x > 0) - (x < 0)


def node_sign(family: GameFamily, v: Vertex, w: Vertex, duplicate: int) -> int:
    """Sign of the pair from the two tight-system determinants.

    Blocks are ordered: shared strategy sets ascending, the duplicate's unit
    row or column in its own slot between the payoff block and the identity
    block. Determinant signs are invariant under the orderings that move rows
    and columns of both systems together, so this choice is canonical.
    """
    m, n = family.m, family.n
    a, c, beta = family.a, family.c, family.beta
    big_x = sorted(lab for lab in v.labels if lab <= m)
    big_y = sorted(lab - m for lab in w.labels if lab > m)
    minus_x = sorted(set(range(1, m + 1)) - set(big_x))
    minus_y = sorted(set(range(1, n + 1)) - set(big_y))
    dup_is_row = duplicate <= m

    # Row player system over columns (y_Y, y_-Y, pi1).
    y_order = big_y + minus_y
    y_pos = {j: idx for idx, j in enumerate(y_order)}
    ev_rows: list[list[Rat]] = [[Fraction(1)] * n + [Fraction(0)]]
    for i in big_x:
        ev_rows.append([a[i - 1, j - 1] for j in y_order] + [Fraction(-1)])
    if not dup_is_row:
        unit = [Fraction(0)] * (n + 1)
        unit[y_pos[duplicate - m]] = Fraction(-1)
        ev_rows.append(unit)
    for j in minus_y:
        unit = [Fraction(0)] * (n + 1)
        unit[y_pos[j]] = Fraction(-1)
        ev_rows.append(unit)
    det_v = determinant(Matrix(ev_rows))

    # Column player system over rows (lambda, x_X, x_-X, pi2), constraint columns.
    x_order = big_x + minus_x
    x_pos = {i: idx for idx, i in enumerate(x_order)}
    cols: list[list[Rat]] = []
    cols.append([Fraction(0)] + [Fraction(1)] * m + [Fraction(0)])
    for j in big_y:
        cols.append(
            [beta[j - 1]]
            + [c[i - 1, j - 1] for i in x_order]
            + [Fraction(-1)]
        )
    if dup_is_row:
        unit = [Fraction(0)] * (m + 2)
        unit[1 + x_pos[duplicate]] = Fraction(-1)
        cols.append(unit)
    for i in minus_x:
        unit = [Fraction(0)] * (m + 2)
        unit[1 + x_pos[i]] = Fraction(-1)
        cols.append(unit)
    det_w = determinant(Matrix(cols).transpose())

    s = _sign(det_v * det_w)
    if s == 0:
        raise DegeneratePolytope("singular tight system at a fully-labeled pair")
    return s


def make_node(family: GameFamily, v: Vertex, w: Vertex) -> PathNode:
    """Validate full labeling, find the duplicate, and attach the sign."""
    union = v.labels | w.labels
    full = frozenset(range(1, family.m + family.n + 1))
    if union != full:
        raise NotFullyLabeled(f"missing labels {sorted(full - union)}")
    shared = v.labels & w.labels
    if len(shared) != 1:
        raise MultipleDuplicates(f"shared labels {sorted(shared)}")
    dup = next(iter(shared))
    return PathNode(v, w, dup, node_sign(family, v, w, dup))


def step(family: GameFamily, node: PathNode, side: str) -> tuple[PathEdge, Optional[PathNode]]:
    """Relax the duplicate in one polytope; return the edge and its far node.

    side 'P' pivots the row polytope (edge type (E_w, w)); side 'Q' pivots the
    lifted polytope (type (v, E_v)). A None far node marks an unbounded edge,
    which only occurs on the two path rays.
    """
    if side == "P":
        ed = family.p.pivot(node.v, node.duplicate)
        if ed.unbounded:
            raise RankGamesError("unexpected unbounded edge in the row polytope")
        far = make_node(family, ed.far_end, node.w)
        edge = PathEdge(W_FIXED, node.w, ed, node, far, FORWARD)
    elif side == "Q":
        ed = family.qp.pivot(node.w, node.duplicate)
        if ed.unbounded:
            return PathEdge(V_FIXED, node.v, ed, node, None, FORWARD), None
        far = make_node(family, node.v, ed.far_end)
        edge = PathEdge(V_FIXED, node.v, ed, node, far, FORWARD)
    else:
        raise ValueError(f"side must be 'P' or 'Q', got {side!r}")
    if far.sign != -node.sign:
        raise RankGamesError(
            f"sign alternation violated: {node.sign} -> {far.sign} at {sorted(far.v.basis)}"
        )
    return edge, far


def _walk_side(node: PathNode) -> str:
    # Positive sign directs the P-side relaxation away from the node.
    return "P" if node.sign > 0 else "Q"


def trace_path(family: GameFamily) -> ComponentTrace:
    """The unique path, oriented from the low ray to the high ray."""
    v_s = family.v_s()
    w0 = family.w_start()
    u0 = make_node(family, v_s, w0)
    if u0.sign != 1:
        raise RankGamesError("start node sign is not +1; orientation broken")
    ray = family.qp.pivot(w0, u0.duplicate)
    if not ray.unbounded:
        raise RankGamesError("relaxing the start duplicate did not open the low ray")
    edges: list[PathEdge] = [PathEdge(V_FIXED, v_s, ray, None, u0, BACKWARD)]
    nodes: list[PathNode] = [u0]
    seen = {u0.key()}
    budget = step_budget(family.m, family.n)
    node = u0
    while True:
        edge, far = step(family, node, _walk_side(node))
        edges.append(edge)
        if far is None:
            break
        if far.key() in seen:
            raise RankGamesError("path revisited a node; traversal is broken")
        seen.add(far.key())
        nodes.append(far)
        node = far
        if len(nodes) > budget:
            raise StepBudgetExceeded(f"more than {budget} nodes on the path")
    v_e = family.v_e()
    if edges[-1].fixed.basis != v_e.basis:
        raise RankGamesError("path did not terminate at the high-ray vertex")
    if family.lambda_of(edges[-1].moving.base) != family.start.lambda_e:
        raise RankGamesError("high ray does not start at its lambda bound")
    return ComponentTrace("path", tuple(nodes), tuple(edges))


def trace_cycle(family: GameFamily, seed: PathNode) -> ComponentTrace:
    """Closed alternating traversal from a node that is not on the path."""
    nodes: list[PathNode] = [seed]
    edges: list[PathEdge] = []
    budget = step_budget(family.m, family.n)
    node = seed
    while True:
        edge, far = step(family, node, _walk_side(node))
        edges.append(edge)
        if far is None:
            raise RankGamesError("seed lies on the path, not on a cycle")
        if far.key() == seed.key():
            break
        nodes.append(far)
        node = far
        if len(nodes) > budget:
            raise StepBudgetExceeded(f"more than {budget} nodes on a cycle")
    return ComponentTrace("cycle", tuple(nodes), tuple(edges))


def oriented_edge(
    family: GameFamily, kind: str, fixed: Vertex, ed: EdgeDescriptor
) -> PathEdge:
    """Orient an edge found mid-path by the signs of its endpoint nodes.

    Moving edges of type (v, E_v) point at their +1 node, edges of type
    (E_w, w) at their -1 node; rays put the infinite end opposite the single
    bounding node.
    """
    if kind == V_FIXED:
        base_node = make_node(family, fixed, ed.base)
        far_node = make_node(family, fixed, ed.far_end) if ed.far_end else None
        head_sign = 1
    else:
        base_node = make_node(family, ed.base, fixed)
        far_node = make_node(family, ed.far_end, fixed) if ed.far_end else None
        head_sign = -1
    if far_node is None:
        if base_node.sign == head_sign:
            return PathEdge(kind, fixed, ed, None, base_node, BACKWARD)
        return PathEdge(kind, fixed, ed, base_node, None, FORWARD)
    if base_node.sign == far_node.sign:
        raise RankGamesError("edge endpoints share a sign; orientation broken")
    if far_node.sign == head_sign:
        return PathEdge(kind, fixed, ed, base_node, far_node, FORWARD)
    return PathEdge(kind, fixed, ed, far_node, base_node, BACKWARD)


def g_value(family: GameFamily, node: PathNode) -> Rat:
    """Path coordinate: beta . y + lambda (strictly monotone on rank-1 paths)."""
    return vdot(family.beta, family.y_of(node.v)) + family.lambda_of(node.w)


def _fmt_labels(labels: frozenset[int]) -> str:
    return ",".join(str(x) for x in sorted(labels))


def export_lines(family: GameFamily, trace: ComponentTrace) -> list[str]:
    """Line-oriented trace records with exact rationals."""
    lines = [f"trace kind={trace.kind} nodes={len(trace.nodes)} edges={len(trace.edges)}"]

    def lam_str(edge: PathEdge) -> str:
        m = family.m
        if edge.kind == W_FIXED:
            return str(edge.fixed.coords[m])
        lo = edge.moving.base.coords[m]
        if edge.moving.unbounded:
            rate = edge.moving.direction[m]
            return f"[{lo},+inf)" if rate > 0 else f"(-inf,{lo}]"
        hi = edge.moving.far_end.coords[m]
        lo, hi = min(lo, hi), max(lo, hi)
        return f"[{lo},{hi}]"

    edge_iter = iter(trace.edges)
    if trace.kind == "path":
        first = next(edge_iter)
        lines.append(
            f"edge kind={first.kind} fixed={_fmt_labels(first.fixed.basis)} "
            f"tight={_fmt_labels(first.moving.tight_set)} lambda={lam_str(first)}"
        )
    for node, edge in zip(trace.nodes, edge_iter):
        lines.append(
            f"node v={_fmt_labels(node.v.basis)} w={_fmt_labels(node.w.basis)} "
            f"dup={node.duplicate} sign={'+1' if node.sign > 0 else '-1'} "
            f"lambda={family.lambda_of(node.w)}"
        )
        lines.append(
            f"edge kind={edge.kind} fixed={_fmt_labels(edge.fixed.basis)} "
            f"tight={_fmt_labels(edge.moving.tight_set)} lambda={lam_str(edge)}"
        )
    return lines

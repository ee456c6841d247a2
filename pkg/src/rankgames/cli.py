"""Command-line front end: game files in, bit-exact equilibria out.

Game file format: optional '#' comment lines, a header ``m n``, then m rows
of n tokens for the first payoff matrix and m more for the second. Tokens are
integers or fractions like ``-3/4``. All output stays exact; JSON renders
every rational as a string.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from math import ceil
from typing import Optional, Sequence

from .algorithms import (
    bin_search,
    enumerate_general,
    enumerate_rank1,
    fixed_point_record,
    fixed_point_search,
    general_embedding,
    region_graph,
)
from .errors import (
    ConstantBeta,
    DegeneracyError,
    DependentBetas,
    DimensionMismatch,
    IterationCapExceeded,
    RankGamesError,
    RankTooHigh,
    StepBudgetExceeded,
    TooLarge,
    ZeroBeta,
)
from .games import (
    BimatrixGame,
    EquilibriumRecord,
    Rank1Decomposition,
    decompose_rank1,
    decompose_rank_k,
    default_beta,
    reduce_constant_beta,
)
from .labeledpath import export_lines, make_node, trace_cycle, trace_path
from .linalg import Matrix, matrix_rank
from .oracle import support_enumeration
from .paramlp import fixed_point_eval
from .polytope import GameFamily, RankKFamily

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_GUARD = 4


class ParseError(RankGamesError):
    """Game file or argument syntax error (exit code 2)."""


def parse_fraction(token: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational token {token!r}") from exc


def parse_game_file(text: str) -> BimatrixGame:
    tokens: list[str] = []
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            tokens.extend(stripped.split())
    if len(tokens) < 2:
        raise ParseError("missing 'm n' header")
    try:
        m, n = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise ParseError("header entries must be integers") from exc
    if m < 1 or n < 1:
        raise ParseError("dimensions must be at least 1")
    need = 2 + 2 * m * n
    if len(tokens) != need:
        raise ParseError(f"expected {need} tokens, found {len(tokens)}")
    values = [parse_fraction(t) for t in tokens[2:]]
    rows_a = [values[i * n: (i + 1) * n] for i in range(m)]
    rows_b = [values[m * n + i * n: m * n + (i + 1) * n] for i in range(m)]
    return BimatrixGame(Matrix(rows_a), Matrix(rows_b))


def render_game(game: BimatrixGame) -> str:
    lines = [f"{game.m} {game.n}"]
    for mat in (game.a, game.b):
        for i in range(mat.rows):
            lines.append(" ".join(str(x) for x in mat.row(i)))
    return "\n".join(lines) + "\n"


def _rat_str(x: Fraction) -> str:
    return str(x)


def _vec_str(v: Sequence[Fraction]) -> str:
    return "(" + ", ".join(_rat_str(x) for x in v) + ")"


def record_line(rec: EquilibriumRecord) -> str:
    idx = "unknown" if rec.index is None else f"{rec.index:+d}"
    return f"x = {_vec_str(rec.profile.x)}; y = {_vec_str(rec.profile.y)}; index {idx}"


def record_json(rec: EquilibriumRecord) -> dict:
    return {
        "x": [_rat_str(v) for v in rec.profile.x],
        "y": [_rat_str(v) for v in rec.profile.y],
        "payoff1": _rat_str(rec.payoff1),
        "payoff2": _rat_str(rec.payoff2),
        "support": [list(rec.support[0]), list(rec.support[1])],
        "index": rec.index,
        "provenance": rec.provenance,
    }


def perturb_game(game: BimatrixGame, seed: int) -> BimatrixGame:
    """Deterministic tiny perturbation of the row payoffs.

    Adds independent uniform rationals from (0, 1/D) to every entry of the
    first matrix; a rank-1 factorization, when present, is rebuilt so the
    perturbed game stays rank-1.
    """
    rng = random.Random(seed)
    m, n = game.m, game.n
    top = max(game.a.max_abs(), game.b.max_abs())
    d_scale = 2 * (m + n) * (int(ceil(top)) + 1) * 10**6
    eps = Matrix(
        [[Fraction(rng.randint(1, 10**6 - 1), 10**6 * d_scale) for _ in range(n)]
         for _ in range(m)]
    )
    a2 = game.a + eps
    try:
        d = decompose_rank1(game)
        b2 = -a2 + Matrix.outer(d.gamma, d.beta)
    except RankTooHigh:
        b2 = game.b
    return BimatrixGame(a2, b2)


def _beta_override(args) -> Optional[tuple]:
    if args.beta is None:
        return None
    beta = tuple(parse_fraction(t) for t in args.beta.split(","))
    if len(set(beta)) < 2:
        raise ParseError("--beta needs at least two distinct entries")
    return beta


def _rank1_or_none(game: BimatrixGame, beta) -> Optional[Rank1Decomposition]:
    try:
        return decompose_rank1(game, beta)
    except RankTooHigh:
        return None


def _family_for(game: BimatrixGame, beta) -> tuple[GameFamily, tuple]:
    """Natural embedding: rank-1 inputs use c = -a, others c = b, weights 0.

    A constant-beta rank-1 factorization is reduced to its zero-sum
    equivalent first (generic default vector), since the path machinery needs
    distinct extreme entries.
    """
    d1 = _rank1_or_none(game, beta)
    if d1 is not None:
        if all(b == d1.beta[0] for b in d1.beta):
            zero_sum = reduce_constant_beta(d1)
            fam = GameFamily(zero_sum.a, zero_sum.a.scale(-1), default_beta(game.n))
            return fam, tuple([0] * game.m)
        return GameFamily(d1.a, d1.a.scale(-1), d1.beta), d1.gamma
    d = general_embedding(game, beta)
    return GameFamily(d.a, d.c, d.beta), d.gamma


def cmd_solve(game: BimatrixGame, args, out: dict) -> None:
    beta = _beta_override(args)
    d1 = _rank1_or_none(game, beta)
    if d1 is not None:
        report = bin_search(d1)
        out["records"] = [report.equilibrium]
        out["iterations"] = report.iterations
        out["bound_k"] = report.bound_k
    else:
        print(
            "warning: payoff sum has rank >= 2; falling back to the first "
            "path equilibrium",
            file=sys.stderr,
        )
        out["records"] = [enumerate_general(game, beta)[0]]


def cmd_enumerate(game: BimatrixGame, args, out: dict) -> None:
    beta = _beta_override(args)
    d1 = _rank1_or_none(game, beta)
    if d1 is not None:
        out["records"] = enumerate_rank1(d1)
    else:
        out["records"] = enumerate_general(game, beta)


def cmd_index(game: BimatrixGame, args, out: dict) -> None:
    cmd_enumerate(game, args, out)


def cmd_oracle(game: BimatrixGame, args, out: dict) -> None:
    out["records"] = list(support_enumeration(game).equilibria)


def cmd_rank(game: BimatrixGame, args, out: dict) -> None:
    s = game.payoff_sum()
    d = decompose_rank_k(game)
    out["rank"] = matrix_rank(s)
    out["decomposition"] = {
        "gammas": [[_rat_str(v) for v in g] for g in d.gammas],
        "betas": [[_rat_str(v) for v in b] for b in d.betas],
    }
    out["lines"] = [f"rank(A+B) = {out['rank']}"]
    for l, (g, b) in enumerate(zip(d.gammas, d.betas), start=1):
        out["lines"].append(f"gamma_{l} = {_vec_str(g)}  beta_{l} = {_vec_str(b)}")


def cmd_trace(game: BimatrixGame, args, out: dict) -> None:
    family, _gamma = _family_for(game, _beta_override(args))
    if args.all_from:
        try:
            v_part, w_part = args.all_from.split("/")
            v_basis = frozenset(int(t) for t in v_part.split(","))
            w_basis = frozenset(int(t) for t in w_part.split(","))
        except ValueError as exc:
            raise ParseError("--all-from wants 'v1,v2,../w1,w2,..'") from exc
        seed = make_node(
            family,
            family.p.vertex_from_basis(v_basis),
            family.qp.vertex_from_basis(w_basis),
        )
        trace = trace_cycle(family, seed)
    else:
        trace = trace_path(family)
    out["lines"] = export_lines(family, trace)
    out["trace"] = {
        "kind": trace.kind,
        "nodes": [
            {
                "v_basis": sorted(u.v.basis),
                "w_basis": sorted(u.w.basis),
                "duplicate": u.duplicate,
                "sign": u.sign,
                "lambda": _rat_str(family.lambda_of(u.w)),
            }
            for u in trace.nodes
        ],
    }


def cmd_regions(game: BimatrixGame, args, out: dict) -> None:
    family, _gamma = _family_for(game, _beta_override(args))
    graph = region_graph(family, trace_path(family))
    lines = [f"regions on the {graph.kind}: {len(graph.regions)}"]
    regions_json = []
    for idx, reg in enumerate(graph.regions):
        planes = "; ".join(
            f"{_vec_str(h.coeffs)}.alpha = {_rat_str(h.offset)}" for h in reg.hyperplanes
        )
        lines.append(
            f"region {idx}: v={','.join(str(x) for x in sorted(reg.vertex.basis))} "
            f"kind={reg.kind} support={reg.support_size} planes[{planes}]"
        )
        regions_json.append(
            {
                "v_basis": sorted(reg.vertex.basis),
                "kind": reg.kind,
                "support_size": reg.support_size,
                "hyperplanes": [
                    {"coeffs": [_rat_str(c) for c in h.coeffs], "offset": _rat_str(h.offset)}
                    for h in reg.hyperplanes
                ],
            }
        )
    out["lines"] = lines
    out["regions"] = regions_json


def cmd_fixedpoint(game: BimatrixGame, args, out: dict) -> None:
    d = decompose_rank_k(game)
    if d.k == 0:
        raise ParseError("zero-sum game: the fixed-point box is empty (k = 0)")
    kfam = RankKFamily(d.a, d.betas)
    if args.k_eval is not None:
        a = tuple(parse_fraction(t) for t in args.k_eval.split(","))
        fa = fixed_point_eval(kfam, d.gammas, a)
        out["lines"] = [f"f{_vec_str(a)} = {_vec_str(fa)} (experimental)"]
        out["fixedpoint"] = {"a": [_rat_str(v) for v in a], "f": [_rat_str(v) for v in fa]}
        return
    tol = parse_fraction(args.tol)
    point = fixed_point_search(kfam, d.gammas, tol=tol, max_iters=args.max_iters)
    if point is None:
        out["lines"] = ["no point within tolerance (experimental heuristic)"]
        out["fixedpoint"] = None
        return
    fa = fixed_point_eval(kfam, d.gammas, point)
    residual = max(abs(f - x) for f, x in zip(fa, point))
    lines = [f"a = {_vec_str(point)} residual = {_rat_str(residual)} (experimental)"]
    if residual == 0:
        rec = fixed_point_record(kfam, d.gammas, point)
        out["records"] = [rec]
    out["lines"] = lines
    out["fixedpoint"] = {
        "a": [_rat_str(v) for v in point],
        "residual": _rat_str(residual),
    }


COMMANDS = {
    "solve": cmd_solve,
    "enumerate": cmd_enumerate,
    "trace": cmd_trace,
    "index": cmd_index,
    "oracle": cmd_oracle,
    "rank": cmd_rank,
    "regions": cmd_regions,
    "fixedpoint": cmd_fixedpoint,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="game file path")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--perturb", type=int, metavar="SEED", default=None,
                        help="retry once with a tiny seeded perturbation on degeneracy")
    common.add_argument("--beta", default=None,
                        help="override the embedding vector, e.g. '1,2,3'")
    common.add_argument("--max-iters", type=int, default=60)
    parser = argparse.ArgumentParser(
        prog="rankgames",
        description="Exact bimatrix equilibrium solver on fully-labeled paths",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "enumerate", "index", "oracle", "rank", "regions"):
        sub.add_parser(name, parents=[common])
    trace_p = sub.add_parser("trace", parents=[common])
    trace_p.add_argument("--all-from", default=None, metavar="SEED",
                         help="trace the cycle through the node 'v1,v2,../w1,w2,..'")
    fp = sub.add_parser("fixedpoint", parents=[common])
    group = fp.add_mutually_exclusive_group(required=True)
    group.add_argument("--k-eval", default=None, metavar="A1,..,AK")
    group.add_argument("--search", action="store_true")
    fp.add_argument("--tol", default="1/1000")
    return parser


def _emit(out: dict, as_json: bool, perturbed: Optional[int]) -> None:
    records = out.get("records")
    if as_json:
        doc: dict = {"perturbed_seed": perturbed}
        if records is not None:
            doc["equilibria"] = [record_json(r) for r in records]
        for key in (
            "rank", "decomposition", "trace", "regions", "fixedpoint",
            "iterations", "bound_k",
        ):
            if key in out and out[key] is not None:
                doc[key] = out[key]
        print(json.dumps(doc, indent=2))
        return
    for line in out.get("lines", []):
        print(line)
    if records is not None:
        for rec in records:
            print(record_line(rec))


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            game = parse_game_file(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    command = COMMANDS[args.command]
    perturbed_seed: Optional[int] = None
    try:
        out: dict = {}
        try:
            command(game, args, out)
        except DegeneracyError as exc:
            if args.perturb is None:
                print(
                    f"error: degenerate instance ({exc}); rerun with --perturb SEED",
                    file=sys.stderr,
                )
                return EXIT_DEGENERATE
            perturbed_seed = args.perturb
            print(
                f"notice: degenerate instance ({exc}); retrying on a perturbed game "
                f"(seed={args.perturb}) -- output belongs to the perturbed game",
                file=sys.stderr,
            )
            out = {}
            command(perturb_game(game, args.perturb), args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ZeroBeta, ConstantBeta, DependentBetas, DimensionMismatch) as exc:
        print(f"error: unusable embedding vector ({exc})", file=sys.stderr)
        return EXIT_PARSE
    except DegeneracyError as exc:
        print(f"error: still degenerate after perturbation ({exc})", file=sys.stderr)
        return EXIT_DEGENERATE
    except (TooLarge, StepBudgetExceeded, IterationCapExceeded) as exc:
        print(f"error: guard exceeded ({exc})", file=sys.stderr)
        return EXIT_GUARD

    _emit(out, args.json, perturbed_seed)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

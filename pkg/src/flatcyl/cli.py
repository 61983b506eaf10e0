"""Command line interface: ``flatcyl <command> ...``.

Exit codes: 0 ok, 1 violation found, 2 input error, 3 budget exceeded.
JSON output is canonical (sorted keys) so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from .cylgraph import build_ball, connect_path, estimate_hyperbolicity, find_triangle, path_certificate
from .errors import BudgetExceeded, FlatSurfaceError, InputError, SearchBudgetTooSmall
from .exactnum import Direction, Vec2, as_fe
from .flow import cylinder_decomposition, enumerate_saddle_connections
from .quotient import enumerate_prototypes, is_prototype, matches_golden, quotient_graph
from .surface import (
    DEFAULT_BUDGET,
    SCHEMA,
    build_prototype_surface,
    build_regular_octagon,
    build_slit_torus,
    build_square_tiled,
    one_cylinder_origami,
    six_square_surface,
    surface_from_json,
    surface_to_json,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_R2 = 16


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


def default_budget() -> int:
    raw = os.environ.get("FLATSURF_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise CliError(EXIT_INPUT, "InputError", f"FLATSURF_BUDGET must be an integer, got {raw!r}")
    if value <= 0:
        raise CliError(EXIT_INPUT, "InputError", "FLATSURF_BUDGET must be positive")
    return value


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _number(text: str):
    try:
        return as_fe(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise CliError(EXIT_INPUT, "InputError", f"not a rational number: {text!r}")


def _positive(text: str):
    x = _number(text)
    if x.sign() <= 0:
        raise CliError(EXIT_INPUT, "InputError", f"expected a positive number, got {text}")
    return x


def bundled_corpus():
    """Named surfaces used by ``check`` when no files are given."""
    out = []
    for D in (5, 8, 9, 12, 13):
        p = enumerate_prototypes(D)[0]
        out.append((f"prototype {p}", build_prototype_surface(p)))
    out.append(("six-square", six_square_surface()))
    out.append(("one-cylinder 4 squares", one_cylinder_origami(4)))
    out.append(("origami (1,2)(3,4,5) / (1,3)", build_square_tiled("(1,2)(3,4,5)", "(1,3)(2)(4)(5)",
                                                                  mode="genus2")))
    return out


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return surface_from_json(json.load(fh))
    except OSError as exc:
        raise CliError(EXIT_INPUT, "InputError", str(exc))
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, "InputError", f"{path}: invalid JSON ({exc})")


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _surface_summary(S) -> dict:
    return {
        "schema": SCHEMA,
        "stratum": S.stratum,
        "genus": S.genus,
        "area": str(S.area),
        "cone_angles_pi": [S.cone_angle_pi(c) for c in S.singular],
    }


# ------------------------------------------------------------------ commands


def cmd_build(args):
    if args.prototype:
        D, a, b, c, e = args.prototype
        if not is_prototype(a, b, c, e, D):
            raise CliError(EXIT_INPUT, "InvalidPrototype", f"({a},{b},{c},{e}) is not a prototype of D={D}")
        S = build_prototype_surface((a, b, c, e))
    elif args.square_tiled:
        S = build_square_tiled(args.square_tiled[0], args.square_tiled[1], mode="any")
    elif args.octagon:
        S = build_regular_octagon()
    else:
        v1x, v1y, v2x, v2y, sx, sy = (_number(t) for t in args.slit_torus)
        S = build_slit_torus(((v1x, v1y), (v2x, v2y)), (sx, sy))
    if args.shear:
        S = S.transformed(((1, _number(args.shear)), (0, 1)))
    if args.output:
        _emit(dumps(surface_to_json(S)) + "\n", args.output)
    print(dumps(_surface_summary(S)))
    return EXIT_OK


def _direction(args):
    x, y = _number(args.direction[0]), _number(args.direction[1])
    if x.sign() == 0 and y.sign() == 0:
        raise CliError(EXIT_INPUT, "InputError", "direction must be nonzero")
    return Direction(Vec2(x, y))


def cmd_decompose(args):
    S = _load(args.surface)
    dec = cylinder_decomposition(S, _direction(args), args.budget)
    out = {"schema": SCHEMA, **dec.to_json()}
    print(dumps(out))
    return EXIT_OK if dec.periodic else EXIT_BUDGET


def cmd_saddles(args):
    S = _load(args.surface)
    sc = enumerate_saddle_connections(S, _positive(args.max_len2), args.budget)
    print(dumps({"schema": SCHEMA, "max_len2": args.max_len2, "saddles": [s.to_json() for s in sc]}))
    return EXIT_OK


def _centers(ball, spec):
    if spec is None:
        return ()
    if spec == "horiz":
        return tuple(i for i, c in enumerate(ball.vertices) if c.d.y.sign() == 0)
    try:
        idx = int(spec)
    except ValueError:
        raise CliError(EXIT_INPUT, "InputError", f"--center expects 'horiz' or a vertex index, got {spec!r}")
    if not 0 <= idx < ball.n:
        raise CliError(EXIT_INPUT, "InputError", f"vertex {idx} out of range")
    return (idx,)


def cmd_graph(args):
    S = _load(args.surface)
    ball = build_ball(S, _positive(args.ball_r2), not args.no_degenerates, args.budget)
    centers = _centers(ball, args.center)
    if args.format == "dot":
        _emit(ball.to_dot(), args.output)
    else:
        _emit(dumps(ball.to_json(centers)) + "\n", args.output)
    return EXIT_OK if ball.recheck() else EXIT_VIOLATION


def cmd_quotient(args):
    r2 = _positive(args.search_r2) if args.search_r2 else None
    G = quotient_graph(args.disc, search_r2=r2, budget=args.budget)
    if args.format == "dot":
        _emit(G.to_dot(), args.output)
    else:
        _emit(dumps(G.to_json()) + "\n", args.output)
    if args.disc in (5, 8, 9) and not matches_golden(G):
        return EXIT_VIOLATION
    return EXIT_OK


def _random_pairs(ball, count, seed):
    rng = random.Random(seed)
    pairs = []
    n = ball.n
    if n < 2:
        return pairs
    for _ in range(count):
        i, j = rng.sample(range(n), 2)
        pairs.append((ball.vertices[i], ball.vertices[j]))
    return pairs


def cmd_path(args):
    S = _load(args.surface)
    ball = build_ball(S, _positive(args.ball_r2), True, args.budget)
    results = [connect_path(S, C, D) for C, D in _random_pairs(ball, args.pairs, args.seed)]
    cert = path_certificate(results)
    print(dumps(cert))
    return EXIT_OK if cert["ok"] else EXIT_VIOLATION


def _suite_dichotomy(corpus, budget):
    rows, ok = [], True
    for name, S in corpus:
        found = []
        for r2 in (4, 9, 16):
            found.append(find_triangle(build_ball(S, r2, True, budget)) is not None)
        if S.stratum == "H(2)":
            good = not any(found)
        elif S.stratum == "H(1,1)":
            good = any(found)
        else:
            good = True
        ok &= good
        rows.append({"surface": name, "stratum": S.stratum, "triangle_at_r2_4_9_16": found, "ok": good})
    return rows, ok


def _suite_paths(corpus, budget, pairs, seed):
    rows, ok = [], True
    for name, S in corpus:
        ball = build_ball(S, 4, True, budget)
        cert = path_certificate([connect_path(S, C, D) for C, D in _random_pairs(ball, pairs, seed)])
        ok &= cert["ok"]
        rows.append({"surface": name, "pairs": len(cert["pairs"]), "ok": cert["ok"]})
    return rows, ok


def _suite_prototypes(max_disc=40):
    rows, ok = [], True
    for D in (d for d in range(5, max_disc + 1) if d % 4 in (0, 1)):
        for p in enumerate_prototypes(D):
            S = build_prototype_surface(p)
            good = is_prototype(*p, D) and S.stratum == "H(2)" and S.area == p.lam * p.lam + p.b * p.c
            ok &= good
            rows.append({"prototype": str(p), "D": D, "ok": good})
    return rows, ok


def _suite_hyperbolicity(corpus, budget, seed):
    rows = []
    for name, S in corpus:
        if S.stratum != "H(2)":
            continue
        ball = build_ball(S, 4, True, budget).largest_component()
        rows.append({"surface": name, "delta_hat": str(estimate_hyperbolicity(ball, 2000, seed))})
    return rows, True


def cmd_check(args):
    corpus = [(p, _load(p)) for p in args.surfaces] if args.surfaces else bundled_corpus()
    suites = ["dichotomy", "paths", "prototypes", "hyperbolicity"] if args.suite == "all" else [args.suite]
    report, ok = {"schema": SCHEMA}, True
    for suite in suites:
        if suite == "dichotomy":
            rows, good = _suite_dichotomy(corpus, args.budget)
        elif suite == "paths":
            rows, good = _suite_paths(corpus, args.budget, args.pairs, args.seed)
        elif suite == "prototypes":
            rows, good = _suite_prototypes()
        else:
            rows, good = _suite_hyperbolicity(corpus, args.budget, args.seed)
        report[suite] = {"rows": rows, "ok": good}
        ok &= good
    report["ok"] = ok
    print(dumps(report))
    return EXIT_OK if ok else EXIT_VIOLATION


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flatcyl", description="Cylinders on genus-two translation surfaces.")
    parser.add_argument("--budget", type=int, default=None,
                        help=f"separatrix crossing budget (default {DEFAULT_BUDGET}, or $FLATSURF_BUDGET)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a surface and write it as JSON")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--prototype", nargs=5, type=int, metavar=("D", "A", "B", "C", "E"))
    src.add_argument("--square-tiled", nargs=2, metavar=("H", "V"), help="permutations in cycle notation")
    src.add_argument("--octagon", action="store_true", help="regular octagon with opposite sides glued")
    src.add_argument("--slit-torus", nargs=6, metavar=("V1X", "V1Y", "V2X", "V2Y", "SX", "SY"))
    p.add_argument("--shear", help="apply the horizontal shear ((1, s), (0, 1))")
    p.add_argument("-o", "--output", help="surface file to write")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("decompose", help="cylinder decomposition in a direction")
    p.add_argument("surface")
    p.add_argument("--direction", nargs=2, default=("1", "0"), metavar=("X", "Y"))
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("saddles", help="saddle connections up to a squared length")
    p.add_argument("surface")
    p.add_argument("--max-len2", default=str(DEFAULT_R2))
    p.set_defaults(func=cmd_saddles)

    p = sub.add_parser("graph", help="ball in the cylinder graph")
    p.add_argument("surface")
    p.add_argument("--ball-r2", default=str(DEFAULT_R2))
    p.add_argument("--center", help="'horiz' or a vertex index; adds BFS distances")
    p.add_argument("--no-degenerates", action="store_true")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("quotient", help="quotient graph of the prototype family of discriminant D")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--search-r2", help="fixed neighbour search radius (strict)")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("path", help="certified short paths between random cylinder pairs")
    p.add_argument("surface")
    p.add_argument("--ball-r2", default="4")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("check", help="run invariant suites")
    p.add_argument("surfaces", nargs="*", help="surface files (default: bundled corpus)")
    p.add_argument("--suite", choices=("dichotomy", "paths", "prototypes", "hyperbolicity", "all"),
                   default="all")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.budget is None:
            args.budget = default_budget()
        elif args.budget <= 0:
            raise CliError(EXIT_INPUT, "InputError", "--budget must be positive")
        return args.func(args)
    except CliError as exc:
        return _fail(exc.code, exc.kind, str(exc))
    except (BudgetExceeded, SearchBudgetTooSmall) as exc:
        return _fail(EXIT_BUDGET, type(exc).__name__, str(exc))
    except (InputError, ValueError, KeyError, TypeError) as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    except FlatSurfaceError as exc:
        return _fail(EXIT_VIOLATION, type(exc).__name__, str(exc))


def _fail(code, kind, message) -> int:
    sys.stderr.write(dumps({"schema": SCHEMA, "error": kind, "message": message, "exit": code}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

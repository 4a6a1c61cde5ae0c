"""Command line front end: ``aqsp generate | solve | bench | check``.

Exit codes: 0 success, 1 check failure, 2 invalid input or usage,
3 no walk between the requested endpoints.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .baseline import brute_force
from .bench import ALGORITHMS, ExperimentConfig, run_and_persist
from .fileio import read_aqg, read_elevation_csv, write_aqg
from .generators import gen_configuration, gen_erdos_renyi, gen_grid, random_elevation_grid
from .graph import scale_quadratic
from .solvers import solve

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_NO_WALK = 3

CHECK_TOL = 1e-9


def _int_list(text: str):
    return tuple(int(tok) for tok in text.split(",") if tok)


def _float_list(text: str):
    return tuple(float(tok) for tok in text.split(",") if tok)


def _algo_list(text: str):
    return tuple(tok for tok in text.split(",") if tok)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqsp",
        description="Shortest walks with consecutive-arc interaction costs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="synthesize an instance and write a .aqg file")
    gen.add_argument("--family", required=True, choices=["erdos", "config", "grid"])
    gen.add_argument("--nodes", type=int, help="node count (erdos, config)")
    gen.add_argument("--p", type=float, default=0.8, help="arc probability (erdos)")
    gen.add_argument("--degree", type=int, default=8, help="node degree (config)")
    gen.add_argument("--rows", type=int, help="grid rows")
    gen.add_argument("--cols", type=int, help="grid cols")
    gen.add_argument("--neighbors", type=int, default=8, choices=[2, 4, 8])
    gen.add_argument("--wrap", action="store_true", help="toroidal grid")
    gen.add_argument("--quad", default="turn", choices=["turn", "table", "zero"],
                     help="grid interaction model")
    gen.add_argument("--turn-weight", type=float, default=1.0)
    gen.add_argument("--elevation", type=Path, help="CSV elevation matrix (grid)")
    gen.add_argument("--relief", type=float, default=0.0,
                     help="random elevation amplitude when no CSV is given")
    gen.add_argument("--cell-size", type=float, default=1.0)
    gen.add_argument("--lambda", dest="lam", type=float, default=1.0,
                     help="scale interaction costs before writing")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True)

    sol = sub.add_parser("solve", help="solve one s-t query on a .aqg file")
    sol.add_argument("graph", type=Path)
    sol.add_argument("source", type=int)
    sol.add_argument("target", type=int)
    sol.add_argument("--algo", default="aqastar", choices=list(ALGORITHMS))
    sol.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sol.add_argument("--exhaustive", action="store_true",
                     help="drain the queue instead of stopping at the target")
    sol.add_argument("--check-alpha", action="store_true",
                     help="print the full repeated-node detour report")
    sol.add_argument("--max-walk-nodes", type=int, default=40,
                     help="truncate printed walks beyond this many nodes")

    ben = sub.add_parser("bench", help="run an experiment grid, write CSV + plot script")
    ben.add_argument("--family", required=True,
                     choices=["erdos", "config_model", "grid", "grid_stress"])
    ben.add_argument("--sizes", type=_int_list, required=True,
                     help="comma list: node counts, or grid side lengths")
    ben.add_argument("--p", type=float, default=0.8)
    ben.add_argument("--degree", type=int, default=8)
    ben.add_argument("--neighbors", type=int, default=8, choices=[2, 4, 8])
    ben.add_argument("--wrap", action="store_true")
    ben.add_argument("--quad", default="turn", choices=["turn", "table", "zero"])
    ben.add_argument("--turn-weight", type=float, default=1.0)
    ben.add_argument("--relief", type=float, default=1.0)
    ben.add_argument("--cell-size", type=float, default=1.0)
    ben.add_argument("--lambda", dest="lambdas", type=_float_list, default=(1.0,),
                     help="comma list of interaction scale factors")
    ben.add_argument("--reps", type=int, default=1)
    ben.add_argument("--algo", dest="algorithms", type=_algo_list,
                     default=ALGORITHMS, help="comma list from aqd,aqastar,lin")
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--out", type=Path, required=True, help="output directory")
    ben.add_argument("--name", default="bench", help="output file stem")
    ben.add_argument("--memory-budget-gb", type=float, default=8.0)

    chk = sub.add_parser("check", help="cross-check all algorithms on one query")
    chk.add_argument("graph", type=Path)
    chk.add_argument("source", type=int)
    chk.add_argument("target", type=int)

    return parser


def _generate(args) -> int:
    if args.family == "erdos":
        if args.nodes is None:
            raise ValueError("--nodes is required for erdos")
        g = gen_erdos_renyi(args.nodes, args.p, args.seed)
    elif args.family == "config":
        if args.nodes is None:
            raise ValueError("--nodes is required for config")
        g = gen_configuration(args.nodes, args.degree, args.seed)
    else:
        if args.elevation is not None:
            elev = read_elevation_csv(args.elevation, cell_size=args.cell_size)
        else:
            if args.rows is None or args.cols is None:
                raise ValueError("--rows and --cols (or --elevation) are required for grid")
            elev = random_elevation_grid(
                args.rows, args.cols, args.relief, args.seed, args.cell_size
            )
        turn_weight = args.turn_weight
        if args.quad == "turn" and args.lam != 1.0:
            # fold the scale into the turn weight so the file keeps a FUNC tag
            turn_weight = turn_weight * args.lam
        g = gen_grid(
            elev,
            neighbors=args.neighbors,
            quad_model=args.quad,
            seed=args.seed,
            turn_weight=turn_weight,
            wrap=args.wrap,
        )
    # turn models fold the factor into their weight; zero models are fixpoints
    if args.lam != 1.0 and not (args.family == "grid" and args.quad in ("turn", "zero")):
        g = scale_quadratic(g, args.lam)
    write_aqg(g, args.out)
    keys = g.arc_tail * g.node_count + g.arc_head
    mutual = int(np.isin(g.arc_head * g.node_count + g.arc_tail, keys).sum())
    print(
        f"wrote {args.out}: nodes={g.node_count} arcs={g.arc_count} "
        f"undirected_pairs={mutual // 2} quad_arcs={g.quad_arc_count}"
    )
    return EXIT_OK


def _format_walk(walk, limit: int) -> str:
    if len(walk) <= limit:
        return "(" + ", ".join(map(str, walk)) + ")"
    head = ", ".join(map(str, walk[: limit // 2]))
    tail = ", ".join(map(str, walk[-limit // 2 :]))
    return f"({head}, ... [{len(walk)} nodes] ..., {tail})"


def _solve(args) -> int:
    g = read_aqg(args.graph)
    if args.lam != 1.0:
        g = scale_quadratic(g, args.lam)
    result = solve(
        g, args.source, args.target, args.algo, run_to_exhaustion=args.exhaustive
    )
    if not result.found:
        print(f"no walk from {args.source} to {args.target}")
        return EXIT_NO_WALK
    print(f"cost {result.cost!r}")
    print(f"walk {_format_walk(result.walk, args.max_walk_nodes)}")
    print(f"simple {result.is_simple}")
    if result.alpha_report is not None:
        rep = result.alpha_report
        kind = "improving" if rep.improving else "non-improving"
        print(f"alpha-cycle {kind}: spliced cost {rep.simplified_cost!r}")
        if args.check_alpha:
            print(f"  spliced walk {_format_walk(rep.simplified_walk, args.max_walk_nodes)}")
    elif args.check_alpha:
        print("alpha-cycle none")
    st = result.stats
    print(f"stats popped={st.popped} relaxations={st.relaxations} updated={st.updated}")
    return EXIT_OK


def _bench(args) -> int:
    config = ExperimentConfig(
        family=args.family,
        sizes=args.sizes,
        out_dir=args.out,
        p=args.p,
        degree=args.degree,
        neighbors=args.neighbors,
        grid_quad=args.quad,
        turn_weight=args.turn_weight,
        relief=args.relief,
        cell_size=args.cell_size,
        wrap=args.wrap,
        lambdas=args.lambdas,
        reps=args.reps,
        algorithms=args.algorithms,
        seed=args.seed,
        memory_budget_bytes=int(args.memory_budget_gb * (1 << 30)),
        name=args.name,
    )
    csv_path, plot_path, rows = run_and_persist(config)
    disagreements = sum(1 for r in rows if not r.agreement)
    print(f"wrote {csv_path} ({len(rows)} rows) and {plot_path}")
    if disagreements:
        print(f"WARNING: {disagreements} rows disagree beyond {1e-9}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _check(args) -> int:
    g = read_aqg(args.graph)
    s, t = args.source, args.target
    outcomes = {}
    outcomes["aqd"] = solve(g, s, t, "aqd")
    outcomes["aqastar"] = solve(g, s, t, "aqastar")
    outcomes["aqastar-exhaustive"] = solve(g, s, t, "aqastar", run_to_exhaustion=True)
    outcomes["lin"] = solve(g, s, t, "lin")
    costs = {name: r.cost for name, r in outcomes.items()}
    if g.node_count <= 10:
        bf_cost, _ = brute_force(g, s, t, 2 * g.node_count)
        costs["brute-force"] = bf_cost
    names = sorted(costs)
    failed = False
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            ca, cb = costs[a], costs[b]
            same_inf = math.isinf(ca) and math.isinf(cb)
            ok = same_inf or math.isclose(ca, cb, rel_tol=CHECK_TOL, abs_tol=CHECK_TOL)
            print(f"{'PASS' if ok else 'FAIL'} {a} vs {b}: {ca!r} vs {cb!r}")
            failed = failed or not ok
    base = outcomes["aqd"]
    if base.found:
        print(f"optimum {base.cost!r} simple={base.is_simple}")
    else:
        print("no walk")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "generate": _generate,
        "solve": _solve,
        "bench": _bench,
        "check": _check,
    }[args.command]
    try:
        return handler(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

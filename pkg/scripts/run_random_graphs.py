#!/usr/bin/env python3
"""Random-graph experiment: search times across instance sizes.

Sweeps Erdos-Renyi digraphs (p = 0.8, sizes 100..400) and degree-8
configuration-model graphs, timing every algorithm on each instance.
Defaults are sized for a laptop; raise --reps and --config-sizes to match
the full campaign.

Usage:
    python scripts/run_random_graphs.py --out results/ [--reps 10]
"""

import argparse
from pathlib import Path

from aqsp.bench import ExperimentConfig, run_and_persist


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--p", type=float, default=0.8)
    ap.add_argument("--erdos-sizes", type=str, default="100,150,200,250,300,350,400")
    ap.add_argument("--config-sizes", type=str, default="2000,5000,10000")
    ap.add_argument("--degree", type=int, default=8)
    args = ap.parse_args()

    erdos = ExperimentConfig(
        family="erdos",
        sizes=tuple(int(s) for s in args.erdos_sizes.split(",")),
        p=args.p,
        reps=args.reps,
        seed=args.seed,
        out_dir=args.out,
        name="erdos",
    )
    csv_path, plot_path, rows = run_and_persist(erdos)
    print(f"erdos: {len(rows)} rows -> {csv_path}, {plot_path}")

    config_model = ExperimentConfig(
        family="config_model",
        sizes=tuple(int(s) for s in args.config_sizes.split(",")),
        degree=args.degree,
        reps=args.reps,
        seed=args.seed,
        out_dir=args.out,
        name="config_model",
    )
    csv_path, plot_path, rows = run_and_persist(config_model)
    print(f"config_model: {len(rows)} rows -> {csv_path}, {plot_path}")
    bad = [r for r in rows if not r.agreement]
    if bad:
        print(f"WARNING: {len(bad)} rows disagree")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

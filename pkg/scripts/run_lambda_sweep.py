#!/usr/bin/env python3
"""Interaction-cost sensitivity: scale factors lambda in {1, 5, 50, 500, 1000}.

Fixes one Erdos-Renyi size and one configuration-model size, scales the
interaction costs per lambda, and times every algorithm.  Costs must agree
per cell across algorithms regardless of lambda; the CSV records timings to
inspect whether scaling moves them.

Usage:
    python scripts/run_lambda_sweep.py --out results/ [--reps 10]
"""

import argparse
from pathlib import Path

from aqsp.bench import ExperimentConfig, run_and_persist

LAMBDAS = (1.0, 5.0, 50.0, 500.0, 1000.0)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--erdos-size", type=int, default=400)
    ap.add_argument("--config-size", type=int, default=10000)
    args = ap.parse_args()

    failures = 0
    for family, size in (("erdos", args.erdos_size), ("config_model", args.config_size)):
        config = ExperimentConfig(
            family=family,
            sizes=(size,),
            lambdas=LAMBDAS,
            reps=args.reps,
            seed=args.seed,
            out_dir=args.out,
            name=f"lambda_{family}",
        )
        csv_path, plot_path, rows = run_and_persist(config)
        bad = [r for r in rows if not r.agreement]
        failures += len(bad)
        print(f"{family} size {size}: {len(rows)} rows -> {csv_path}, {plot_path}")
    if failures:
        print(f"WARNING: {failures} rows disagree")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

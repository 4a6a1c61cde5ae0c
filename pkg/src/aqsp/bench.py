"""Benchmark harness: run experiment grids, persist CSV and a plot script.

One :class:`ResultRow` per (instance, lambda, algorithm).  Timing separates
the build phase (only the linearization baseline has one) from the search
phase, measured with the monotonic clock; generation and I/O are excluded.
Cells run sequentially so timings do not contend.  Row content is
deterministic for a fixed seed except for the timing columns.

Oversized linearizations are skipped up front against a memory budget and
recorded with status ``OOM-skipped`` instead of aborting the run.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .baseline import linearized_core, solve_lin
from .generators import gen_configuration, gen_erdos_renyi, gen_grid, random_elevation_grid
from .graph import QuadGraph, scale_quadratic
from .solvers import PathResult, solve

FAMILIES = ("erdos", "config_model", "grid", "grid_stress")
ALGORITHMS = ("aqd", "aqastar", "lin")

AGREEMENT_TOL = 1e-9


@dataclass
class ExperimentConfig:
    """One experiment grid: a family swept over sizes, lambdas and reps."""

    family: str
    sizes: Tuple[int, ...]
    out_dir: Path
    p: float = 0.8
    degree: int = 8
    neighbors: int = 8
    grid_quad: str = "turn"
    turn_weight: float = 1.0
    relief: float = 1.0
    cell_size: float = 1.0
    wrap: bool = False
    lambdas: Tuple[float, ...] = (1.0,)
    reps: int = 1
    algorithms: Tuple[str, ...] = ALGORITHMS
    seed: int = 0
    memory_budget_bytes: int = 8 << 30
    name: str = "bench"

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.sizes or any(s <= 0 for s in self.sizes):
            raise ValueError("sizes must be positive")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}")
        if any(lam < 0 or not math.isfinite(lam) for lam in self.lambdas):
            raise ValueError("lambdas must be finite and >= 0")
        if not self.lambdas:
            raise ValueError("at least one lambda is required")


@dataclass
class ResultRow:
    instance: str
    nodes: int
    arcs: int
    quad_arcs: int
    algorithm: str
    lam: float
    build_time_s: float
    search_time_s: float
    popped: int
    cost: float
    agreement: bool
    status: str


CSV_COLUMNS = [
    "instance",
    "nodes",
    "arcs",
    "quad_arcs",
    "algorithm",
    "lambda",
    "build_time_s",
    "search_time_s",
    "popped",
    "cost",
    "agreement",
    "status",
]


def _instance_seed(seed: int, size: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, size, rep]).generate_state(1)[0])


def _make_instance(config: ExperimentConfig, size: int, rep: int) -> Tuple[QuadGraph, int, int]:
    inst_seed = _instance_seed(config.seed, size, rep)
    if config.family == "erdos":
        g = gen_erdos_renyi(size, config.p, inst_seed)
        return g, 0, size - 1
    if config.family == "config_model":
        g = gen_configuration(size, config.degree, inst_seed)
        return g, 0, size - 1
    wrap = config.wrap or config.family == "grid_stress"
    elev = random_elevation_grid(size, size, config.relief, inst_seed, config.cell_size)
    g = gen_grid(
        elev,
        neighbors=config.neighbors,
        quad_model=config.grid_quad,
        seed=inst_seed,
        turn_weight=config.turn_weight,
        wrap=wrap,
    )
    return g, 0, g.node_count - 1


def _estimate_lin_bytes(g: QuadGraph) -> int:
    # core CSR (int64 + float64 per slot) plus per-arc label/pred/heap slack
    return g.quad_arc_count * 16 + g.arc_count * 48


def _run_one(g: QuadGraph, s: int, t: int, algo: str) -> Tuple[PathResult, float, float]:
    if algo == "lin":
        t0 = time.perf_counter()
        linearized_core(g)
        t1 = time.perf_counter()
        result = solve_lin(g, s, t)
        t2 = time.perf_counter()
        return result, t1 - t0, t2 - t1
    t0 = time.perf_counter()
    result = solve(g, s, t, algo)
    t1 = time.perf_counter()
    return result, 0.0, t1 - t0


def run_bench(config: ExperimentConfig) -> List[ResultRow]:
    """Execute the experiment grid and return all result rows."""
    config.validate()
    rows: List[ResultRow] = []
    for size in config.sizes:
        for rep in range(config.reps):
            g, s, t = _make_instance(config, size, rep)
            instance = f"{config.family}-{size}-r{rep}"
            for lam in config.lambdas:
                scaled = scale_quadratic(g, lam)
                cell: List[ResultRow] = []
                costs: List[float] = []
                for algo in config.algorithms:
                    if algo == "lin" and _estimate_lin_bytes(scaled) > config.memory_budget_bytes:
                        cell.append(
                            ResultRow(
                                instance, scaled.node_count, scaled.arc_count,
                                scaled.quad_arc_count, algo, lam,
                                math.nan, math.nan, 0, math.nan, True, "OOM-skipped",
                            )
                        )
                        continue
                    try:
                        result, build_s, search_s = _run_one(scaled, s, t, algo)
                    except MemoryError:
                        cell.append(
                            ResultRow(
                                instance, scaled.node_count, scaled.arc_count,
                                scaled.quad_arc_count, algo, lam,
                                math.nan, math.nan, 0, math.nan, True, "OOM-skipped",
                            )
                        )
                        continue
                    status = "ok" if result.found else "no-walk"
                    if result.found:
                        costs.append(result.cost)
                    cell.append(
                        ResultRow(
                            instance, scaled.node_count, scaled.arc_count,
                            scaled.quad_arc_count, algo, lam,
                            build_s, search_s, result.stats.popped, result.cost,
                            True, status,
                        )
                    )
                ran = [r for r in cell if r.status != "OOM-skipped"]
                if any(r.status == "no-walk" for r in ran):
                    agree = all(r.status == "no-walk" for r in ran)
                else:
                    agree = _all_close(costs)
                for r in cell:
                    r.agreement = agree if r.status != "OOM-skipped" else True
                rows.extend(cell)
    return rows


def _all_close(costs: Sequence[float]) -> bool:
    if len(costs) < 2:
        return True
    lo = min(costs)
    hi = max(costs)
    return math.isclose(lo, hi, rel_tol=AGREEMENT_TOL, abs_tol=AGREEMENT_TOL)


def write_csv(rows: Sequence[ResultRow], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.instance, r.nodes, r.arcs, r.quad_arcs, r.algorithm,
                    repr(r.lam), repr(r.build_time_s), repr(r.search_time_s),
                    r.popped, repr(r.cost), str(r.agreement).lower(), r.status,
                ]
            )


def _summarize(rows: Sequence[ResultRow]) -> List[Tuple[int, float, str, float, float, float]]:
    groups: Dict[Tuple[int, float, str], List[float]] = {}
    sizes: Dict[str, int] = {}
    for r in rows:
        if r.status != "ok":
            continue
        key = (r.nodes, r.lam, r.algorithm)
        groups.setdefault(key, []).append(r.search_time_s)
    out = []
    for (nodes, lam, algo), times in sorted(groups.items()):
        out.append((nodes, lam, algo, min(times), sum(times) / len(times), max(times)))
    return out


def write_plot_files(rows: Sequence[ResultRow], config: ExperimentConfig) -> Tuple[Path, Path]:
    """Write per-algorithm min/avg/max summaries and a gnuplot script.

    The x axis is the instance size unless the sweep varies lambda over a
    single size, in which case it is lambda.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = config.name
    summary = _summarize(rows)
    lambda_sweep = len(config.lambdas) > 1 and len(config.sizes) == 1
    xlabel = "lambda" if lambda_sweep else "nodes"
    algo_files = {}
    for algo in config.algorithms:
        path = out_dir / f"{stem}_summary_{algo}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([xlabel, "min_search_s", "avg_search_s", "max_search_s"])
            for nodes, lam, a, mn, avg, mx in summary:
                if a != algo:
                    continue
                x = repr(lam) if lambda_sweep else nodes
                writer.writerow([x, repr(mn), repr(avg), repr(mx)])
        algo_files[algo] = path.name
    plot_path = out_dir / f"{stem}.gp"
    lines = [
        "# gnuplot script: min/avg/max search time per algorithm",
        'set datafile separator ","',
        "set key left top",
        f'set xlabel "{xlabel}"',
        'set ylabel "search time [s]"',
        "set logscale y",
        f'set title "{config.family} search times"',
        f'set output "{stem}.png"',
        "set terminal pngcairo size 900,600",
    ]
    plots = []
    for algo, fname in algo_files.items():
        plots.append(f'"{fname}" using 1:3 with linespoints title "{algo} avg"')
        plots.append(f'"{fname}" using 1:2 with lines dashtype 2 title "{algo} min"')
        plots.append(f'"{fname}" using 1:4 with lines dashtype 3 title "{algo} max"')
    lines.append("plot \\")
    lines.append(", \\\n".join("  " + p for p in plots))
    lines.append("")
    plot_path.write_text("\n".join(lines), encoding="utf-8")
    return out_dir / f"{stem}.csv", plot_path


def run_and_persist(config: ExperimentConfig) -> Tuple[Path, Path, List[ResultRow]]:
    """Run the grid, write ``<name>.csv`` plus plot files, return paths."""
    rows = run_bench(config)
    csv_path = Path(config.out_dir) / f"{config.name}.csv"
    write_csv(rows, csv_path)
    _, plot_path = write_plot_files(rows, config)
    return csv_path, plot_path, rows

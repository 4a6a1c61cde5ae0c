"""Instance synthesis: random digraphs and spatial grid graphs.

All generators draw through ``numpy.random.default_rng(seed)`` in a fixed
order, so a (parameters, seed) pair reproduces the instance bit for bit.
Linear arc costs and stored interaction costs are Unif(0,1) unless the
instance family defines them geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .graph import FunctionalQuadratic, QuadGraph, StoredQuadratic, zero_quadratic

# Canonical neighborhood steps (row delta, col delta); class ids index this.
GRID_DIRECTIONS: Tuple[Tuple[int, int], ...] = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)
_DIR_CLASS: Dict[Tuple[int, int], int] = {d: i for i, d in enumerate(GRID_DIRECTIONS)}

# neighbors=2 keeps the two forward steps only (east, south): an acyclic grid.
_NEIGHBOR_STEPS = {
    2: ((0, 1), (1, 0)),
    4: ((0, -1), (0, 1), (-1, 0), (1, 0)),
    8: GRID_DIRECTIONS,
}


@dataclass(frozen=True)
class ElevationGrid:
    """Regular N x M grid of elevation samples with a ground step size."""

    values: np.ndarray
    cell_size: float = 1.0
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 2 or values.shape[1] < 2:
            raise ValueError("elevation grid must be at least 2 x 2")
        if not np.all(np.isfinite(values)):
            raise ValueError("elevations must be finite")
        if not (self.cell_size > 0):
            raise ValueError("cell_size must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def random_elevation_grid(
    rows: int, cols: int, relief: float = 1.0, seed: int = 0, cell_size: float = 1.0
) -> ElevationGrid:
    """Uniform random elevations in [0, relief); relief 0 gives a flat grid."""
    if relief < 0:
        raise ValueError("relief must be >= 0")
    rng = np.random.default_rng(seed)
    values = rng.random((rows, cols)) * relief
    return ElevationGrid(values=values, cell_size=cell_size)


def gen_erdos_renyi(n: int, p: float, seed: int) -> QuadGraph:
    """Random digraph: each ordered pair (u, v), u != v, is an arc w.p. ``p``."""
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    tails, heads = np.nonzero(mask)
    costs = rng.random(tails.shape[0])
    g = QuadGraph.from_arrays(n, tails, heads, costs, zero_quadratic())
    return g._with_quad(StoredQuadratic(rng.random(g.quad_arc_count)))


def gen_configuration(n: int, degree: int, seed: int) -> QuadGraph:
    """Random ``degree``-regular graph via stub matching, symmetrized.

    Stubs are shuffled and paired; a pair forming a self-loop or duplicate
    edge swaps its second stub with a random later one, keeping the degree
    sequence exact.  Each undirected edge becomes two opposing arcs, so every
    node ends with in-degree = out-degree = ``degree``.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if degree >= n:
        raise ValueError("degree must be < n")
    if (n * degree) % 2 != 0:
        raise ValueError("n * degree must be even")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), degree)
    max_attempts = 100 * n
    attempts = 0
    pairs: Optional[list] = None
    while pairs is None:
        arr = stubs[rng.permutation(stubs.size)].tolist()
        total = len(arr)
        seen = set()
        trial: Optional[list] = []
        for pos in range(0, total, 2):
            u = arr[pos]
            v = arr[pos + 1]
            while u == v or (u, v) in seen or (v, u) in seen:
                attempts += 1
                if attempts > max_attempts:
                    raise RuntimeError(
                        "stub matching failed to avoid collisions; try another seed"
                    )
                if pos + 2 >= total:
                    # dead end at the final pair: redo the whole matching
                    trial = None
                    break
                swap = int(rng.integers(pos + 2, total))
                arr[pos + 1], arr[swap] = arr[swap], arr[pos + 1]
                v = arr[pos + 1]
            if trial is None:
                break
            seen.add((u, v))
            trial.append((u, v))
        pairs = trial
    us = np.fromiter((e[0] for e in pairs), dtype=np.int64, count=len(pairs))
    vs = np.fromiter((e[1] for e in pairs), dtype=np.int64, count=len(pairs))
    tails = np.concatenate([us, vs])
    heads = np.concatenate([vs, us])
    order = np.lexsort((heads, tails))
    costs = rng.random(tails.shape[0])
    g = QuadGraph.from_arrays(n, tails[order], heads[order], costs, zero_quadratic())
    return g._with_quad(StoredQuadratic(rng.random(g.quad_arc_count)))


def _wrap_delta(d: int, size: int) -> int:
    if d > 1:
        return d - size
    if d < -1:
        return d + size
    return d


def _turn_cost_tables(weight: float) -> Tuple[Dict[Tuple[int, int, int, int], float], np.ndarray]:
    """Turn costs keyed by step-delta pairs and as a class-pair table.

    Cost = weight * theta / pi with theta the absolute planar angle between
    the two steps: 0 when collinear, weight/2 for a right angle, weight for a
    U-turn.  Both views hold identical floats.
    """
    table = np.zeros((8, 8))
    by_delta: Dict[Tuple[int, int, int, int], float] = {}
    for c1, (dr1, dc1) in enumerate(GRID_DIRECTIONS):
        for c2, (dr2, dc2) in enumerate(GRID_DIRECTIONS):
            cross = dc1 * dr2 - dr1 * dc2
            dot = dc1 * dc2 + dr1 * dr2
            theta = math.atan2(abs(cross), dot)
            cost = weight * (theta / math.pi)
            table[c1, c2] = cost
            by_delta[(dr1, dc1, dr2, dc2)] = cost
    table.setflags(write=False)
    return by_delta, table


def _turn_evaluator(rows: int, cols: int, weight: float, wrap: bool):
    by_delta, _ = _turn_cost_tables(weight)

    def gamma(i: int, j: int, k: int) -> float:
        ri, ci = divmod(i, cols)
        rj, cj = divmod(j, cols)
        rk, ck = divmod(k, cols)
        dr1 = rj - ri
        dc1 = cj - ci
        dr2 = rk - rj
        dc2 = ck - cj
        if wrap:
            dr1 = _wrap_delta(dr1, rows)
            dc1 = _wrap_delta(dc1, cols)
            dr2 = _wrap_delta(dr2, rows)
            dc2 = _wrap_delta(dc2, cols)
        try:
            return by_delta[(dr1, dc1, dr2, dc2)]
        except KeyError:
            raise ValueError(
                f"({i}, {j}, {k}) is not a pair of consecutive grid steps"
            ) from None

    return gamma


def turn_penalty_gamma(e: ElevationGrid, weight: float) -> FunctionalQuadratic:
    """Functional turn-penalty model for a grid built from ``e``.

    Pure in the node triple: weight * (planar turning angle) / pi.  Attach it
    to a graph over the same grid; elevations affect linear costs only.
    """
    if weight < 0:
        raise ValueError("turn weight must be >= 0")
    return FunctionalQuadratic(
        _turn_evaluator(e.rows, e.cols, weight, wrap=False),
        tag=f"turn:{e.rows}:{e.cols}:{weight!r}",
    )


def _arc_dir_classes(g: QuadGraph, rows: int, cols: int, wrap: bool) -> np.ndarray:
    dr = g.arc_head // cols - g.arc_tail // cols
    dc = g.arc_head % cols - g.arc_tail % cols
    if wrap:
        dr = np.where(dr > 1, dr - rows, np.where(dr < -1, dr + rows, dr))
        dc = np.where(dc > 1, dc - cols, np.where(dc < -1, dc + cols, dc))
    classes = np.empty(g.arc_count, dtype=np.uint16)
    lut = np.full((3, 3), -1, dtype=np.int64)
    for (sr, sc), cls in _DIR_CLASS.items():
        lut[sr + 1, sc + 1] = cls
    classes[:] = lut[dr + 1, dc + 1]
    return classes


def grid_turn_model(
    g: QuadGraph, rows: int, cols: int, weight: float, wrap: bool = False
) -> FunctionalQuadratic:
    """Turn-penalty model with the kernel-friendly class-pair form attached."""
    if weight < 0:
        raise ValueError("turn weight must be >= 0")
    _, table = _turn_cost_tables(weight)
    tag = f"turn:{rows}:{cols}:{weight!r}" + (":wrap" if wrap else "")
    return FunctionalQuadratic(
        _turn_evaluator(rows, cols, weight, wrap),
        tag=tag,
        pair_class=_arc_dir_classes(g, rows, cols, wrap),
        pair_table=table,
    )


def gen_grid(
    e: ElevationGrid,
    neighbors: int = 8,
    quad_model: str = "turn",
    seed: int = 0,
    *,
    turn_weight: float = 1.0,
    wrap: bool = False,
) -> QuadGraph:
    """Spatial grid graph: one node per elevation sample.

    Arcs connect each cell to its chosen neighborhood (2 = east+south only,
    4 adds the opposite directions, 8 adds diagonals); for 4 and 8 every
    connection exists in both directions.  The linear cost of an arc is the
    3D Euclidean step length, so flat diagonal steps cost sqrt(2) times an
    axis step.  ``quad_model`` selects the interaction costs: ``zero``,
    ``turn`` (turn penalty of strength ``turn_weight``), or ``table``
    (Unif(0,1) per consecutive-arc slot, drawn from ``seed``).

    ``wrap`` closes the grid toroidally (needs at least 3 rows and columns),
    which makes every node degree-``neighbors`` exactly.
    """
    if neighbors not in _NEIGHBOR_STEPS:
        raise ValueError("neighbors must be one of 2, 4, 8")
    if quad_model not in ("zero", "turn", "table"):
        raise ValueError("quad_model must be one of zero, turn, table")
    rows, cols = e.rows, e.cols
    if wrap and (rows < 3 or cols < 3):
        raise ValueError("toroidal grids need at least 3 rows and 3 columns")
    idx = np.arange(rows * cols, dtype=np.int64).reshape(rows, cols)
    z = e.values.ravel()
    cell = float(e.cell_size)
    tails_parts = []
    heads_parts = []
    costs_parts = []
    for dr, dc in _NEIGHBOR_STEPS[neighbors]:
        if wrap:
            src = idx
            dst = np.roll(np.roll(idx, -dr, axis=0), -dc, axis=1)
        else:
            r0, r1 = max(0, -dr), rows - max(0, dr)
            c0, c1 = max(0, -dc), cols - max(0, dc)
            src = idx[r0:r1, c0:c1]
            dst = idx[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
        t = src.ravel()
        h = dst.ravel()
        dz = z[h] - z[t]
        planar = (dr * cell) ** 2 + (dc * cell) ** 2
        tails_parts.append(t)
        heads_parts.append(h)
        costs_parts.append(np.sqrt(planar + dz * dz))
    tails = np.concatenate(tails_parts)
    heads = np.concatenate(heads_parts)
    costs = np.concatenate(costs_parts)
    g = QuadGraph.from_arrays(rows * cols, tails, heads, costs, zero_quadratic())
    if quad_model == "turn":
        return g._with_quad(grid_turn_model(g, rows, cols, turn_weight, wrap))
    if quad_model == "table":
        rng = np.random.default_rng(seed)
        return g._with_quad(StoredQuadratic(rng.random(g.quad_arc_count)))
    classes = np.zeros(g.arc_count, dtype=np.uint16)
    zero_tag = "zero"
    return g._with_quad(
        FunctionalQuadratic(
            lambda i, j, k: 0.0,
            tag=zero_tag,
            pair_class=classes,
            pair_table=np.zeros((1, 1)),
        )
    )

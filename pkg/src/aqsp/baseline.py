"""Linearization baseline and an exhaustive small-instance oracle.

The linearization maps each arc of the original graph to a node of an
expanded graph: arc-node (i, j) connects to arc-node (j, k) with weight
``c(j, k) + q(i, j, k)``, a super-source connects to the arcs leaving the
query source with their linear cost, and the arcs entering the query target
connect to a super-sink at zero cost.  A standard linear Dijkstra on the
expanded graph then yields the same s-t optimum as the arc-label solvers,
on any instance with non-negative costs (walks with repeated nodes
included).  The quadratic core of the expansion depends only on the graph,
so it is cached and reused across queries; only the source/sink couplings
are per-query.

``brute_force`` enumerates every s-t walk up to an arc budget and is the
independent oracle the test suite checks the solvers against.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .graph import QuadGraph, StoredQuadratic, quad_slot_values, slot_successor_arcs, walk_cost
from .solvers import (
    PathResult,
    SearchStats,
    _best_arc_into,
    _check_node,
    _run_node_dijkstra,
)


@dataclass
class LinearizedCore:
    """Arc-to-arc expansion shared by every query on one graph.

    CSR over arc-nodes: row ``a`` lists the arcs consecutive to ``a`` with
    weights ``c(successor) + q(pair)``.
    """

    indptr: np.ndarray
    to_node: np.ndarray
    weight: np.ndarray


@dataclass
class LinearizedGraph:
    """Fully expanded graph for one (source, target) query.

    Nodes 0..|A|-1 are the original arcs (same ids), node |A| is the
    super-source, node |A|+1 the super-sink.
    """

    indptr: np.ndarray
    to_node: np.ndarray
    weight: np.ndarray
    source_index: int
    sink_index: int

    @property
    def node_count(self) -> int:
        return self.indptr.shape[0] - 1

    @property
    def edge_count(self) -> int:
        return self.to_node.shape[0]


_core_cache: "weakref.WeakKeyDictionary[QuadGraph, LinearizedCore]" = (
    weakref.WeakKeyDictionary()
)


def linearized_core(g: QuadGraph) -> LinearizedCore:
    """Build (or fetch) the cached quadratic-edge core of the expansion."""
    core = _core_cache.get(g)
    if core is None:
        a2_seq = slot_successor_arcs(g)
        weight = g.arc_cost[a2_seq] + quad_slot_values(g)
        core = LinearizedCore(indptr=g.qslot_start, to_node=a2_seq, weight=weight)
        _core_cache[g] = core
    return core


def linearize(g: QuadGraph, s: int, t: int) -> LinearizedGraph:
    """Expanded graph for an s-t query: |A|+2 nodes, one edge per
    consecutive-arc pair plus outdeg(s) source and indeg(t) sink couplings."""
    _check_node(g, s, "source")
    _check_node(g, t, "target")
    core = linearized_core(g)
    m = g.arc_count
    source = m
    sink = m + 1
    s_arcs = np.arange(g.out_start[s], g.out_start[s + 1], dtype=np.int64)
    t_arcs = g.in_arcs_of(t).astype(np.int64)
    rows = np.concatenate(
        [
            np.repeat(np.arange(m, dtype=np.int64), np.diff(core.indptr)),
            np.full(s_arcs.shape[0], source, dtype=np.int64),
            t_arcs,
        ]
    )
    cols = np.concatenate([core.to_node, s_arcs, np.full(t_arcs.shape[0], sink, dtype=np.int64)])
    weights = np.concatenate([core.weight, g.arc_cost[s_arcs], np.zeros(t_arcs.shape[0])])
    order = np.argsort(rows, kind="stable")
    indptr = np.zeros(m + 3, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=m + 2), out=indptr[1:])
    return LinearizedGraph(
        indptr=indptr,
        to_node=cols[order],
        weight=weights[order],
        source_index=source,
        sink_index=sink,
    )


def solve_lin(g: QuadGraph, s: int, t: int, *, backend: str = "auto") -> PathResult:
    """Solve an s-t query with linear Dijkstra on the expanded graph.

    Runs over the cached core with the super-source realized as multi-seeded
    start distances and the super-sink as an early-stop set, which is
    edge-for-edge equivalent to searching the explicit expansion.
    """
    _check_node(g, s, "source")
    _check_node(g, t, "target")
    if s == t:
        raise ValueError("source and target must differ")
    core = linearized_core(g)
    m = g.arc_count
    seeds = np.arange(g.out_start[s], g.out_start[s + 1], dtype=np.int64)
    seed_dists = np.ascontiguousarray(g.arc_cost[seeds])
    stop_mask = np.zeros(m, dtype=np.uint8)
    stop_mask[g.in_arcs_of(t)] = 1
    dist, pred, popped, relaxations, updated = _run_node_dijkstra(
        m,
        core.indptr,
        core.to_node,
        core.weight,
        seeds,
        seed_dists,
        stop_mask,
        backend,
        g.quad_arc_count + m,
    )
    # +1: extracting the super-source itself.
    stats = SearchStats(popped + 1, relaxations, updated)
    best_arc, _ = _best_arc_into(g, dist, t)
    if best_arc < 0:
        return PathResult(None, math.inf, True, None, stats)
    chain = [best_arc]
    a = best_arc
    for _ in range(m + 1):
        a = int(pred[a])
        if a < 0:
            break
        chain.append(a)
    else:
        raise RuntimeError("broken predecessor chain in linearized search")
    chain.reverse()
    walk = [int(g.arc_tail[chain[0]])]
    walk.extend(int(g.arc_head[a]) for a in chain)
    return _package(g, tuple(walk), stats, t)


def _package(g: QuadGraph, walk: Tuple[int, ...], stats: SearchStats, t: int) -> PathResult:
    from .graph import find_alpha_cycle, simplify_walk
    from .solvers import AlphaReport

    cost = walk_cost(g, walk)
    if find_alpha_cycle(walk) is None:
        return PathResult(walk, cost, True, None, stats)
    simplified, simplified_cost, _ = simplify_walk(g, walk)
    report = AlphaReport(simplified, simplified_cost, simplified_cost > cost)
    return PathResult(walk, cost, False, report, stats)


def brute_force(
    g: QuadGraph, s: int, t: int, max_arcs: int
) -> Tuple[float, Optional[Tuple[int, ...]]]:
    """Minimum compound cost over all s-t walks of at most ``max_arcs`` arcs.

    Exhaustive depth-first enumeration; the only pruning discards prefixes
    already at or above the incumbent, which is sound because extensions
    cannot decrease the cost.  Exponential in ``max_arcs`` by design.
    """
    if max_arcs < 1:
        raise ValueError("max_arcs must be >= 1")
    _check_node(g, s, "source")
    _check_node(g, t, "target")
    out_start = g.out_start
    arc_head = g.arc_head
    arc_cost = g.arc_cost
    quad = g.quad
    stored = isinstance(quad, StoredQuadratic)
    if stored:
        qvals = quad.values
        qslot_start = g.qslot_start

    best_cost = math.inf
    best_walk: Optional[Tuple[int, ...]] = None
    path = [s]

    def extend(node: int, prev_arc: int, prev_node: int, cost: float, arcs_used: int):
        nonlocal best_cost, best_walk
        if cost >= best_cost:
            return
        if node == t and arcs_used >= 1:
            best_cost = cost
            best_walk = tuple(path)
        if arcs_used == max_arcs:
            return
        lo = int(out_start[node])
        hi = int(out_start[node + 1])
        for a in range(lo, hi):
            if prev_arc < 0:
                q = 0.0
            elif stored:
                q = float(qvals[qslot_start[prev_arc] + a - lo])
            else:
                q = float(quad.func(prev_node, node, int(arc_head[a])))
            nxt = int(arc_head[a])
            path.append(nxt)
            extend(nxt, a, node, cost + float(arc_cost[a]) + q, arcs_used + 1)
            path.pop()

    extend(s, -1, -1, 0.0, 0)
    return best_cost, best_walk

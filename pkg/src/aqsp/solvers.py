"""Exact searches for minimum-cost walks under consecutive-arc costs.

Two label-setting algorithms over arc labels ``dist[a]`` (the cheapest walk
from the source ending with arc ``a``):

* :func:`aq_dijkstra` - plain best-first extraction by ``dist``; settles
  every reachable arc.
* :func:`aq_astar` - a target-directed variant keyed by
  ``dist[a] + bound[head(a)]``, where ``bound`` comes from a backward linear
  Dijkstra from the target (:func:`backward_cost_to_go`).  Since interaction
  costs are non-negative, the linear distances are admissible and consistent
  lower bounds, so extraction order stays label-setting and the search may
  stop at the first arc entering the target.

Both searches seed from a virtual start arc (s, s) with label 0 that
contributes no cost to the first real arc.  With all costs non-negative each
arc is extracted at most once and extraction keys are non-decreasing; the
returned optimum is the cheapest s-t *walk*, which may revisit nodes.
Passing a graph with a functional quadratic model evaluates interaction
costs on the fly; nothing is materialized.

Solver state (labels, queue, counters) is private per invocation, so
concurrent solves on one shared graph are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import List, Optional, Tuple

import numpy as np

from . import _kernels
from .graph import (
    FunctionalQuadratic,
    QuadGraph,
    StoredQuadratic,
    find_alpha_cycle,
    simplify_walk,
    walk_cost,
)

PRED_START = -1
PRED_NONE = -2

# Below this much relaxation work the interpreter beats JIT dispatch overhead.
_KERNEL_MIN_WORK = 20_000


@dataclass
class SearchStats:
    """Instrumentation counters for one search invocation.

    ``popped`` counts priority-queue extractions (stale lazy-deletion entries
    excluded, the virtual start arc included); ``relaxations`` counts label
    update tests; ``updated`` counts tests that improved a label.  When
    extraction recording is requested the per-extraction keys and arc ids are
    kept as well (virtual start arc = -1).
    """

    popped: int
    relaxations: int
    updated: int
    extraction_keys: Optional[List[float]] = None
    extracted_arcs: Optional[List[int]] = None


@dataclass
class ArcLabels:
    """Per-arc tentative distances and predecessor arcs from one source.

    ``pred`` holds the predecessor arc id, ``PRED_START`` (-1) for arcs
    relaxed directly from the virtual start arc, and ``PRED_NONE`` (-2) for
    unlabeled arcs.
    """

    dist: np.ndarray
    pred: np.ndarray
    source: int

    @property
    def start_dist(self) -> float:
        """Label of the virtual start arc (source, source); always 0."""
        return 0.0


@dataclass
class CostToGo:
    """Per-node linear lower bounds on the remaining cost to ``target``."""

    bound: np.ndarray
    target: int


@dataclass
class AlphaReport:
    """Outcome of splicing repeated-node detours out of a returned walk."""

    simplified_walk: Tuple[int, ...]
    simplified_cost: float
    improving: bool


@dataclass
class PathResult:
    """A solved s-t query: walk, compound cost, simplicity, and counters."""

    walk: Optional[Tuple[int, ...]]
    cost: float
    is_simple: bool
    alpha_report: Optional[AlphaReport]
    stats: SearchStats

    @property
    def found(self) -> bool:
        return self.walk is not None


_DUMMY_I64 = np.zeros(1, dtype=np.int64)
_DUMMY_F64 = np.zeros(1, dtype=np.float64)
_DUMMY_U16 = np.zeros(1, dtype=np.uint16)
_DUMMY_TBL = np.zeros((1, 1), dtype=np.float64)


def _kernel_quad_form(g: QuadGraph):
    """(qmode, qslot_start, qvals, pair_class, pair_table) or None."""
    quad = g.quad
    if isinstance(quad, StoredQuadratic):
        return _kernels.QMODE_STORED, g.qslot_start, quad.values, _DUMMY_U16, _DUMMY_TBL
    if quad.pair_table is not None:
        return _kernels.QMODE_PAIR, _DUMMY_I64, _DUMMY_F64, quad.pair_class, quad.pair_table
    return None


def _pick_backend(backend: str, work: int, kernel_ok: bool) -> bool:
    """True when the compiled kernel should run."""
    if backend == "python":
        return False
    if backend == "kernel":
        if not _kernels.HAVE_NUMBA:
            raise RuntimeError("kernel backend requested but numba is unavailable")
        if not kernel_ok:
            raise ValueError("quadratic model has no kernel form; use backend='python'")
        return True
    if backend != "auto":
        raise ValueError(f"unknown backend {backend!r}")
    return _kernels.HAVE_NUMBA and kernel_ok and work >= _KERNEL_MIN_WORK


def _check_node(g: QuadGraph, u: int, role: str) -> None:
    if not (0 <= u < g.node_count):
        raise ValueError(f"{role} node {u} out of range [0, {g.node_count})")


def _aq_search_py(g, src, bound, early_stop, target, record):
    """Interpreter twin of ``_kernels.aq_search``; also handles functional models."""
    inf = math.inf
    m = g.arc_count
    dist = np.full(m, inf)
    pred = np.full(m, PRED_NONE, dtype=np.int64)
    out_start = g.out_start
    arc_tail = g.arc_tail
    arc_head = g.arc_head
    arc_cost = g.arc_cost
    quad = g.quad
    stored = isinstance(quad, StoredQuadratic)
    if stored:
        qvals = quad.values
        qslot_start = g.qslot_start
    else:
        func = quad.func
    use_bound = bound is not None
    heap: list = []
    popped = 1
    relaxations = 0
    updated = 0
    keys_log = [] if record else None
    arcs_log = [] if record else None
    if record:
        keys_log.append(float(bound[src]) if use_bound else 0.0)
        arcs_log.append(PRED_START)

    for a2 in range(int(out_start[src]), int(out_start[src + 1])):
        head2 = int(arc_head[a2])
        if use_bound and bound[head2] == inf:
            continue
        relaxations += 1
        cand = float(arc_cost[a2])
        if cand < dist[a2]:
            dist[a2] = cand
            pred[a2] = PRED_START
            updated += 1
            key = float(cand + bound[head2]) if use_bound else cand
            heappush(heap, (key, a2))

    while heap:
        key, a = heappop(heap)
        j = int(arc_head[a])
        dist_a = float(dist[a])
        expected = float(dist_a + bound[j]) if use_bound else dist_a
        if key != expected:
            continue
        popped += 1
        if record:
            keys_log.append(key)
            arcs_log.append(a)
        if early_stop and j == target:
            break
        i = int(arc_tail[a])
        lo = int(out_start[j])
        hi = int(out_start[j + 1])
        if stored:
            base = int(qslot_start[a]) - lo
        for a2 in range(lo, hi):
            head2 = int(arc_head[a2])
            if use_bound and bound[head2] == inf:
                continue
            relaxations += 1
            if stored:
                q = qvals[base + a2]
            else:
                q = func(i, j, head2)
                if q < 0:
                    raise ValueError(
                        f"quadratic evaluator returned negative cost at ({i}, {j}, {head2})"
                    )
            cand = dist_a + arc_cost[a2] + q
            if cand < dist[a2]:
                dist[a2] = cand
                pred[a2] = a
                updated += 1
                key2 = float(cand + bound[head2]) if use_bound else float(cand)
                heappush(heap, (key2, a2))

    return dist, pred, popped, relaxations, updated, keys_log, arcs_log


def _run_aq_search(g, src, bound, early_stop, target, backend, record):
    kernel_form = _kernel_quad_form(g)
    work = g.quad_arc_count + g.arc_count
    if record:
        if backend == "kernel":
            raise ValueError("extraction recording requires the python backend")
        use_kernel = False
    else:
        use_kernel = _pick_backend(backend, work, kernel_form is not None)
    if use_kernel:
        qmode, qslot_start, qvals, pair_class, pair_table = kernel_form
        dist, pred, popped, relaxations, updated = _kernels.aq_search(
            g.out_start,
            g.arc_tail,
            g.arc_head,
            g.arc_cost,
            qmode,
            qslot_start,
            qvals,
            pair_class,
            pair_table,
            src,
            bound if bound is not None else _DUMMY_F64,
            bound is not None,
            target if target is not None else -1,
            early_stop,
        )
        keys_log = arcs_log = None
    else:
        dist, pred, popped, relaxations, updated, keys_log, arcs_log = _aq_search_py(
            g, src, bound, early_stop, target, record
        )
    labels = ArcLabels(dist=dist, pred=pred, source=src)
    stats = SearchStats(popped, relaxations, updated, keys_log, arcs_log)
    return labels, stats


def aq_dijkstra(
    g: QuadGraph,
    s: int,
    *,
    backend: str = "auto",
    record_extractions: bool = False,
) -> Tuple[ArcLabels, SearchStats]:
    """Settle the cheapest-walk label of every arc reachable from ``s``."""
    _check_node(g, s, "source")
    return _run_aq_search(g, s, None, False, None, backend, record_extractions)


def backward_cost_to_go(g: QuadGraph, t: int, *, backend: str = "auto") -> CostToGo:
    """Linear shortest distance from every node to ``t``, ignoring interactions."""
    _check_node(g, t, "target")
    to_node, weight = g._rev_csr
    dist, _, _, _, _ = _run_node_dijkstra(
        g.node_count,
        g.in_start,
        to_node,
        weight,
        np.array([t], dtype=np.int64),
        np.array([0.0]),
        None,
        backend,
        g.arc_count,
    )
    dist.setflags(write=False)
    return CostToGo(bound=dist, target=t)


def aq_astar(
    g: QuadGraph,
    s: int,
    t: int,
    run_to_exhaustion: bool = False,
    *,
    cost_to_go: Optional[CostToGo] = None,
    backend: str = "auto",
    record_extractions: bool = False,
) -> Tuple[ArcLabels, SearchStats]:
    """Target-guided arc-label search keyed by ``dist + bound[head]``.

    By default the search stops as soon as an arc entering ``t`` is
    extracted, which is valid because extraction keys are non-decreasing and
    the bounds are admissible.  ``run_to_exhaustion`` drains the queue
    instead; either way the s-t optimum matches :func:`aq_dijkstra`.
    """
    _check_node(g, s, "source")
    _check_node(g, t, "target")
    if s == t:
        raise ValueError("source and target must differ")
    if cost_to_go is None:
        cost_to_go = backward_cost_to_go(g, t, backend=backend)
    elif cost_to_go.target != t:
        raise ValueError("cost_to_go was computed for a different target")
    return _run_aq_search(
        g, s, cost_to_go.bound, not run_to_exhaustion, t, backend, record_extractions
    )


def _node_dijkstra_py(num_nodes, indptr, to_node, weight, seed_nodes, seed_dists, stop_mask):
    dist = np.full(num_nodes, math.inf)
    pred = np.full(num_nodes, -1, dtype=np.int64)
    heap: list = []
    popped = 0
    relaxations = 0
    updated = 0
    for u, d in zip(seed_nodes, seed_dists):
        u = int(u)
        d = float(d)
        if d < dist[u]:
            dist[u] = d
            heappush(heap, (d, u))
    while heap:
        key, u = heappop(heap)
        if key != dist[u]:
            continue
        popped += 1
        if stop_mask is not None and stop_mask[u]:
            break
        for e in range(int(indptr[u]), int(indptr[u + 1])):
            relaxations += 1
            v = int(to_node[e])
            cand = key + weight[e]
            if cand < dist[v]:
                dist[v] = cand
                pred[v] = u
                updated += 1
                heappush(heap, (float(cand), v))
    return dist, pred, popped, relaxations, updated


def _run_node_dijkstra(
    num_nodes, indptr, to_node, weight, seed_nodes, seed_dists, stop_mask, backend, work
):
    if _pick_backend(backend, work, True):
        mask = stop_mask if stop_mask is not None else np.zeros(1, dtype=np.uint8)
        return _kernels.node_dijkstra(
            num_nodes, indptr, to_node, weight,
            seed_nodes, seed_dists, mask, stop_mask is not None,
        )
    return _node_dijkstra_py(
        num_nodes, indptr, to_node, weight, seed_nodes, seed_dists, stop_mask
    )


def linear_path_upper_bound(
    g: QuadGraph, s: int, t: int, *, backend: str = "auto"
) -> Tuple[Tuple[int, ...], float]:
    """Evaluate a linear-shortest s-t path under the full compound objective.

    The result bounds the true optimum from above; it is tight whenever the
    interaction costs vanish along the linear-shortest path.
    """
    _check_node(g, s, "source")
    _check_node(g, t, "target")
    if s == t:
        raise ValueError("source and target must differ")
    stop_mask = np.zeros(g.node_count, dtype=np.uint8)
    stop_mask[t] = 1
    dist, pred, _, _, _ = _run_node_dijkstra(
        g.node_count,
        g.out_start,
        g.arc_head,
        g.arc_cost,
        np.array([s], dtype=np.int64),
        np.array([0.0]),
        stop_mask,
        backend,
        g.arc_count,
    )
    if not math.isfinite(dist[t]):
        raise ValueError(f"node {t} is unreachable from {s}")
    nodes = [t]
    u = t
    while u != s:
        u = int(pred[u])
        nodes.append(u)
    nodes.reverse()
    walk = tuple(nodes)
    return walk, walk_cost(g, walk)


def _best_arc_into(g: QuadGraph, dist: np.ndarray, t: int) -> Tuple[int, float]:
    best_arc = -1
    best = math.inf
    for a in g.in_arcs_of(t):
        d = float(dist[a])
        if d < best:
            best = d
            best_arc = int(a)
    return best_arc, best


def extract_walk(g: QuadGraph, labels: ArcLabels, t: int) -> Tuple[int, ...]:
    """Reconstruct the walk behind the cheapest settled arc entering ``t``.

    Follows predecessor arcs from the argmin over arcs into ``t`` (ties to
    the lowest arc id) back to the virtual start arc.
    """
    _check_node(g, t, "target")
    best_arc, _ = _best_arc_into(g, labels.dist, t)
    if best_arc < 0:
        raise ValueError(f"no walk from {labels.source} reaches node {t}")
    nodes = [t]
    a = best_arc
    for _ in range(g.arc_count + 1):
        nodes.append(int(g.arc_tail[a]))
        a = int(labels.pred[a])
        if a == PRED_START:
            nodes.reverse()
            return tuple(nodes)
        if a == PRED_NONE:
            raise RuntimeError("broken predecessor chain")
    raise RuntimeError("predecessor chain exceeds arc count")


def solve(
    g: QuadGraph,
    s: int,
    t: int,
    algo: str = "aqd",
    *,
    run_to_exhaustion: bool = False,
    backend: str = "auto",
) -> PathResult:
    """Run one s-t query and post-check the returned walk.

    ``algo`` is one of ``aqd``, ``aqastar``, ``lin``.  An unreachable target
    yields a result with ``walk=None`` and infinite cost rather than an
    exception.  Non-simple walks get an ``alpha_report`` stating whether the
    spliced-out detours were genuinely cheaper than their shortcuts.
    """
    _check_node(g, s, "source")
    _check_node(g, t, "target")
    if s == t:
        raise ValueError("source and target must differ")
    if algo == "lin":
        from .baseline import solve_lin

        return solve_lin(g, s, t, backend=backend)
    if algo == "aqd":
        labels, stats = aq_dijkstra(g, s, backend=backend)
    elif algo == "aqastar":
        labels, stats = aq_astar(
            g, s, t, run_to_exhaustion=run_to_exhaustion, backend=backend
        )
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    return result_from_labels(g, labels, stats, t)


def result_from_labels(
    g: QuadGraph, labels: ArcLabels, stats: SearchStats, t: int
) -> PathResult:
    """Package settled labels into a :class:`PathResult` for target ``t``."""
    best_arc, best = _best_arc_into(g, labels.dist, t)
    if best_arc < 0:
        return PathResult(None, math.inf, True, None, stats)
    walk = extract_walk(g, labels, t)
    if find_alpha_cycle(walk) is None:
        return PathResult(walk, best, True, None, stats)
    simplified, simplified_cost, _ = simplify_walk(g, walk)
    report = AlphaReport(simplified, simplified_cost, simplified_cost > best)
    return PathResult(walk, best, False, report, stats)

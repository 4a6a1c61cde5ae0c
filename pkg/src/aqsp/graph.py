"""Immutable digraphs whose walk cost couples consecutive arcs.

A :class:`QuadGraph` is a directed graph with a non-negative linear cost per
arc plus a quadratic cost model that assigns a non-negative interaction cost
to every pair of consecutive arcs (i, j), (j, k).  The cost of a walk is the
sum of its arc costs plus the interaction cost of each consecutive arc pair.

Arc ids are assigned in lexicographic (tail, head) order, so the outgoing
arcs of a node form a contiguous id range whose heads are sorted ascending.
Interaction costs live in "slots": arc ``a`` with head ``j`` owns the
contiguous slot range ``qslot_start[a]:qslot_start[a+1]``, one slot per
outgoing arc of ``j`` (U-turn successors included).  The total slot count,
``quad_arc_count``, equals ``sum(indeg(j) * outdeg(j) for j in nodes)``.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

Walk = Sequence[int]

QuadEvaluator = Callable[[int, int, int], float]


class FunctionalQuadratic:
    """On-the-fly quadratic cost model backed by a pure function.

    ``func(i, j, k)`` returns the non-negative interaction cost of the
    consecutive arcs (i, j), (j, k); it must be deterministic.  ``tag`` is an
    optional identifier used by the ``.aqg`` text format (see ``fileio``).

    ``pair_class`` / ``pair_table`` optionally express the same costs as a
    per-arc class index plus a class-pair table (``cost = table[cls_a, cls_b]``),
    which lets the compiled search kernels evaluate the model without calling
    back into Python.  When present they must agree exactly with ``func``.
    """

    __slots__ = ("func", "tag", "pair_class", "pair_table")

    def __init__(
        self,
        func: QuadEvaluator,
        tag: Optional[str] = None,
        pair_class: Optional[np.ndarray] = None,
        pair_table: Optional[np.ndarray] = None,
    ):
        if (pair_class is None) != (pair_table is None):
            raise ValueError("pair_class and pair_table must be given together")
        if pair_table is not None:
            pair_table = np.ascontiguousarray(pair_table, dtype=np.float64)
            if pair_table.ndim != 2 or pair_table.shape[0] != pair_table.shape[1]:
                raise ValueError("pair_table must be square")
            if not np.all(np.isfinite(pair_table)) or np.any(pair_table < 0):
                raise ValueError("pair_table entries must be finite and >= 0")
            pair_class = np.ascontiguousarray(pair_class, dtype=np.uint16)
            if np.any(pair_class >= pair_table.shape[0]):
                raise ValueError("pair_class index exceeds pair_table size")
            pair_table.setflags(write=False)
            pair_class.setflags(write=False)
        self.func = func
        self.tag = tag
        self.pair_class = pair_class
        self.pair_table = pair_table

    def scaled(self, lam: float) -> "FunctionalQuadratic":
        if lam == 1.0:
            return self
        inner = self.func
        table = None if self.pair_table is None else self.pair_table * lam
        return FunctionalQuadratic(
            lambda i, j, k: lam * inner(i, j, k),
            tag=None,
            pair_class=self.pair_class,
            pair_table=table,
        )


class StoredQuadratic:
    """Quadratic cost model materialized per consecutive-arc slot.

    ``values`` has one float per slot in the graph's aligned layout; the slot
    for the pair (arc ``a``, successor arc ``b``) is
    ``qslot_start[a] + (b - out_start[head(a)])``.  Absent input triples are
    zero.
    """

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("stored quadratic values must be one-dimensional")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("quadratic costs must be finite and >= 0")
        values.setflags(write=False)
        self.values = values


QuadModel = Union[StoredQuadratic, FunctionalQuadratic]
QuadSpec = Union[None, Mapping, np.ndarray, QuadModel, QuadEvaluator]


def zero_quadratic() -> FunctionalQuadratic:
    """All-zero interaction costs without materialized storage."""
    return FunctionalQuadratic(
        lambda i, j, k: 0.0,
        tag="zero",
        pair_class=None,
        pair_table=None,
    )


class QuadGraph:
    """Immutable weighted digraph with a quadratic cost model.

    Build through :func:`build_graph` or :meth:`QuadGraph.from_arrays`.  All
    arrays are read-only after construction; every operation here is a pure
    read, so one graph can be shared freely across concurrent solves.
    """

    def __init__(self, *_args, **_kwargs):
        raise TypeError("use build_graph() or QuadGraph.from_arrays()")

    @classmethod
    def _create(
        cls,
        node_count: int,
        arc_tail: np.ndarray,
        arc_head: np.ndarray,
        arc_cost: np.ndarray,
        out_start: np.ndarray,
        in_start: np.ndarray,
        in_arcs: np.ndarray,
        quad_arc_count: int,
        quad: QuadModel,
    ) -> "QuadGraph":
        g = object.__new__(cls)
        g.node_count = node_count
        g.arc_tail = arc_tail
        g.arc_head = arc_head
        g.arc_cost = arc_cost
        g.out_start = out_start
        g.in_start = in_start
        g.in_arcs = in_arcs
        g.quad_arc_count = quad_arc_count
        g.quad = g._bind_quad(quad)
        return g

    @classmethod
    def from_arrays(
        cls,
        node_count: int,
        tails: np.ndarray,
        heads: np.ndarray,
        costs: np.ndarray,
        quad: QuadSpec = None,
    ) -> "QuadGraph":
        """Build a graph from parallel arc arrays (any input order)."""
        if node_count < 1:
            raise ValueError("node_count must be >= 1")
        tails = np.asarray(tails, dtype=np.int64).ravel()
        heads = np.asarray(heads, dtype=np.int64).ravel()
        costs = np.asarray(costs, dtype=np.float64).ravel()
        if not (tails.shape == heads.shape == costs.shape):
            raise ValueError("tails, heads and costs must have equal length")
        m = tails.shape[0]
        if m:
            if tails.min() < 0 or tails.max() >= node_count:
                raise ValueError("arc tail out of range")
            if heads.min() < 0 or heads.max() >= node_count:
                raise ValueError("arc head out of range")
            loops = np.nonzero(tails == heads)[0]
            if loops.size:
                raise ValueError(f"self-loop at node {int(tails[loops[0]])}")
            bad = ~np.isfinite(costs)
            if bad.any():
                raise ValueError("arc cost must be finite")
            neg = np.nonzero(costs < 0)[0]
            if neg.size:
                a = int(neg[0])
                raise ValueError(
                    f"negative cost {costs[a]} on arc ({int(tails[a])}, {int(heads[a])})"
                )
        order = np.lexsort((heads, tails))
        tails = np.ascontiguousarray(tails[order])
        heads = np.ascontiguousarray(heads[order])
        costs = np.ascontiguousarray(costs[order])
        if m > 1:
            dup = np.nonzero((tails[1:] == tails[:-1]) & (heads[1:] == heads[:-1]))[0]
            if dup.size:
                a = int(dup[0])
                raise ValueError(f"duplicate arc ({int(tails[a])}, {int(heads[a])})")

        out_start = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(tails, minlength=node_count), out=out_start[1:])
        in_order = np.lexsort((tails, heads))
        in_arcs = np.ascontiguousarray(in_order.astype(np.int64))
        in_start = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(heads, minlength=node_count), out=in_start[1:])

        outdeg = np.diff(out_start)
        quad_arc_count = int(outdeg[heads].sum()) if m else 0

        for arr in (tails, heads, costs, out_start, in_start, in_arcs):
            arr.setflags(write=False)
        return cls._create(
            node_count, tails, heads, costs, out_start, in_start, in_arcs,
            quad_arc_count, quad,
        )

    def _bind_quad(self, quad: QuadSpec) -> QuadModel:
        if quad is None:
            return StoredQuadratic(np.zeros(self.quad_arc_count))
        if isinstance(quad, StoredQuadratic):
            if quad.values.shape[0] != self.quad_arc_count:
                raise ValueError(
                    f"stored quadratic values have length {quad.values.shape[0]}, "
                    f"expected {self.quad_arc_count}"
                )
            return quad
        if isinstance(quad, FunctionalQuadratic):
            if quad.pair_class is not None and quad.pair_class.shape[0] != self.arc_count:
                raise ValueError("pair_class length must equal arc count")
            return quad
        if isinstance(quad, Mapping):
            values = np.zeros(self.quad_arc_count)
            for (i, j, k), v in quad.items():
                a1 = self.arc_id(i, j)
                if a1 is None:
                    raise ValueError(
                        f"quadratic triple ({i}, {j}, {k}) references missing arc ({i}, {j})"
                    )
                a2 = self.arc_id(j, k)
                if a2 is None:
                    raise ValueError(
                        f"quadratic triple ({i}, {j}, {k}) references missing arc ({j}, {k})"
                    )
                v = float(v)
                if not math.isfinite(v) or v < 0:
                    raise ValueError(f"quadratic cost for ({i}, {j}, {k}) must be finite and >= 0")
                values[self.qslot_start[a1] + a2 - self.out_start[j]] = v
            return StoredQuadratic(values)
        if isinstance(quad, np.ndarray):
            return self._bind_quad(StoredQuadratic(quad))
        if callable(quad):
            return FunctionalQuadratic(quad)
        raise TypeError(f"unsupported quadratic cost spec: {type(quad).__name__}")

    def _with_quad(self, quad: QuadModel) -> "QuadGraph":
        """New graph sharing this structure with a different cost model."""
        return QuadGraph._create(
            self.node_count, self.arc_tail, self.arc_head, self.arc_cost,
            self.out_start, self.in_start, self.in_arcs, self.quad_arc_count,
            quad,
        )

    # -- structure queries ---------------------------------------------------

    @property
    def arc_count(self) -> int:
        return self.arc_tail.shape[0]

    def out_arcs_of(self, u: int) -> range:
        """Outgoing arc ids of ``u`` (a contiguous range)."""
        return range(int(self.out_start[u]), int(self.out_start[u + 1]))

    def in_arcs_of(self, u: int) -> np.ndarray:
        return self.in_arcs[self.in_start[u]:self.in_start[u + 1]]

    def out_degree(self, u: int) -> int:
        return int(self.out_start[u + 1] - self.out_start[u])

    def in_degree(self, u: int) -> int:
        return int(self.in_start[u + 1] - self.in_start[u])

    def arc_id(self, u: int, v: int) -> Optional[int]:
        """Arc id of (u, v), or None if absent."""
        if not (0 <= u < self.node_count and 0 <= v < self.node_count):
            return None
        lo = int(self.out_start[u])
        hi = int(self.out_start[u + 1])
        pos = lo + int(np.searchsorted(self.arc_head[lo:hi], v))
        if pos < hi and self.arc_head[pos] == v:
            return pos
        return None

    def has_arc(self, u: int, v: int) -> bool:
        return self.arc_id(u, v) is not None

    @cached_property
    def qslot_start(self) -> np.ndarray:
        """Prefix offsets of each arc's interaction-slot range (length |A|+1)."""
        outdeg = np.diff(self.out_start)
        starts = np.zeros(self.arc_count + 1, dtype=np.int64)
        if self.arc_count:
            np.cumsum(outdeg[self.arc_head], out=starts[1:])
        starts.setflags(write=False)
        return starts

    @cached_property
    def _rev_csr(self) -> Tuple[np.ndarray, np.ndarray]:
        """Reverse-graph neighbors and weights aligned with ``in_start``."""
        to_node = np.ascontiguousarray(self.arc_tail[self.in_arcs])
        weight = np.ascontiguousarray(self.arc_cost[self.in_arcs])
        to_node.setflags(write=False)
        weight.setflags(write=False)
        return to_node, weight

    # -- cost queries ----------------------------------------------------------

    def quad_cost(self, i: int, j: int, k: int) -> float:
        """Interaction cost of the consecutive arcs (i, j), (j, k)."""
        a1 = self.arc_id(i, j)
        if a1 is None:
            raise ValueError(f"no arc ({i}, {j})")
        a2 = self.arc_id(j, k)
        if a2 is None:
            raise ValueError(f"no arc ({j}, {k})")
        if isinstance(self.quad, StoredQuadratic):
            slot = self.qslot_start[a1] + a2 - self.out_start[j]
            return float(self.quad.values[slot])
        value = float(self.quad.func(i, j, k))
        if value < 0:
            raise ValueError(f"quadratic evaluator returned negative cost at ({i}, {j}, {k})")
        return value


def build_graph(
    node_count: int,
    arcs: Iterable[Tuple[int, int, float]],
    quad: QuadSpec = None,
) -> QuadGraph:
    """Build a :class:`QuadGraph` from (tail, head, cost) triples.

    ``quad`` may be a mapping ``{(i, j, k): cost}``, an aligned slot-value
    array, a :class:`FunctionalQuadratic`, a bare evaluator callable, or None
    for all-zero interactions.
    """
    specs = list(arcs)
    tails = np.array([a[0] for a in specs], dtype=np.int64)
    heads = np.array([a[1] for a in specs], dtype=np.int64)
    costs = np.array([a[2] for a in specs], dtype=np.float64)
    return QuadGraph.from_arrays(node_count, tails, heads, costs, quad)


def slot_successor_arcs(g: QuadGraph) -> np.ndarray:
    """Successor arc id of every consecutive-arc slot, in aligned order."""
    lengths = np.diff(g.out_start)[g.arc_head]
    offsets = np.arange(g.quad_arc_count, dtype=np.int64) - np.repeat(
        g.qslot_start[:-1], lengths
    )
    return np.repeat(g.out_start[g.arc_head], lengths) + offsets


def quad_slot_values(g: QuadGraph) -> np.ndarray:
    """Interaction costs of every consecutive-arc slot, in aligned order.

    For stored models this is the backing array; functional models are
    evaluated slot by slot (vectorized when a class-pair table is attached).
    """
    quad = g.quad
    if isinstance(quad, StoredQuadratic):
        return quad.values
    m = g.arc_count
    lengths = np.diff(g.out_start)[g.arc_head]
    if quad.pair_table is not None:
        a1_rep = np.repeat(np.arange(m, dtype=np.int64), lengths)
        a2_seq = slot_successor_arcs(g)
        return quad.pair_table[quad.pair_class[a1_rep], quad.pair_class[a2_seq]]
    values = np.empty(g.quad_arc_count)
    func = quad.func
    tail = g.arc_tail
    head = g.arc_head
    out_start = g.out_start
    pos = 0
    for a1 in range(m):
        i = int(tail[a1])
        j = int(head[a1])
        for a2 in range(int(out_start[j]), int(out_start[j + 1])):
            values[pos] = func(i, j, int(head[a2]))
            pos += 1
    return values


def materialize_quadratic(g: QuadGraph) -> QuadGraph:
    """Same graph with the quadratic model stored explicitly per slot."""
    if isinstance(g.quad, StoredQuadratic):
        return g
    return g._with_quad(StoredQuadratic(quad_slot_values(g)))


def scale_quadratic(g: QuadGraph, lam: float) -> QuadGraph:
    """Graph whose every interaction cost is ``lam`` times the original.

    Linear costs are untouched.  Functional models wrap their evaluator;
    stored models scale the slot array.
    """
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0:
        raise ValueError("scale factor must be finite and >= 0")
    if isinstance(g.quad, StoredQuadratic):
        if lam == 1.0:
            return g
        return g._with_quad(StoredQuadratic(g.quad.values * lam))
    return g._with_quad(g.quad.scaled(lam))


def walk_cost(g: QuadGraph, walk: Walk) -> float:
    """Compound cost of a walk: arc costs plus consecutive-pair interactions.

    Accumulates ``total + arc_cost + interaction`` step by step, exactly the
    order used by the solvers, so a solver's label and the cost of its
    reconstructed walk agree bitwise.
    """
    if len(walk) < 2:
        raise ValueError("a walk needs at least two nodes")
    quad = g.quad
    stored = isinstance(quad, StoredQuadratic)
    total = 0.0
    prev_arc = -1
    prev_node = -1
    for u, v in zip(walk[:-1], walk[1:]):
        a = g.arc_id(u, v)
        if a is None:
            raise ValueError(f"({u}, {v}) is not an arc")
        if prev_arc < 0:
            q = 0.0
        elif stored:
            q = float(quad.values[g.qslot_start[prev_arc] + a - g.out_start[u]])
        else:
            q = float(quad.func(prev_node, u, v))
            if q < 0:
                raise ValueError(
                    f"quadratic evaluator returned negative cost at ({prev_node}, {u}, {v})"
                )
        total = total + float(g.arc_cost[a]) + q
        prev_arc = a
        prev_node = u
    return total


def find_alpha_cycle(walk: Walk) -> Optional[Tuple[int, int]]:
    """First repeated-interior-node pair (l, k) with walk[l] == walk[k].

    Only indices ``0 < l < k < len(walk) - 1`` qualify; such a pair witnesses
    a detour of at least five nodes returning to walk[l].  Returns the
    lexicographically smallest (l, k), or None for a repeat-free interior.
    """
    n = len(walk)
    if n < 2:
        raise ValueError("a walk needs at least two nodes")
    first: dict = {}
    best: Optional[Tuple[int, int]] = None
    for idx in range(1, n - 1):
        node = walk[idx]
        seen = first.get(node)
        if seen is None:
            first[node] = idx
        elif best is None or seen < best[0]:
            best = (seen, idx)
    return best


def simplify_walk(g: QuadGraph, walk: Walk) -> Tuple[Tuple[int, ...], float, bool]:
    """Splice out repeated-node detours until none remain.

    Each round removes the first detour (l, k) by replacing
    ``walk[l-1 : k+2]`` with ``(walk[l-1], walk[l], walk[k+1])``; both
    replacement arcs are arcs of the original walk, so the result stays a
    walk with the same endpoints.  Returns the reduced walk, its cost, and
    whether that cost strictly undercuts the input's.
    """
    original_cost = walk_cost(g, walk)
    cur = list(walk)
    while True:
        hit = find_alpha_cycle(cur)
        if hit is None:
            break
        l, k = hit
        if not g.has_arc(cur[l], cur[k + 1]):
            raise ValueError(
                f"cannot splice detour: missing shortcut arc ({cur[l]}, {cur[k + 1]})"
            )
        cur = cur[: l + 1] + cur[k + 1 :]
    cost = walk_cost(g, cur)
    return tuple(cur), cost, cost < original_cost

"""Text formats: the ``.aqg`` graph file and elevation CSV input.

``.aqg`` layout (whitespace separated, 0-based node ids, ``repr`` floats)::

    AQG 1
    nodes N arcs M quad K
    <tail> <head> <cost>          M lines
    <i> <j> <k> <cost>            K lines, stored interaction triples

A functional model is declared instead of triples by the alternative header
``nodes N arcs M quad FUNC <tag>``; the tag is resolved through a registry
keyed by its prefix (before the first colon).  Built-ins: ``zero`` and
``turn:<rows>:<cols>:<weight>[:wrap]``.

Writing is deterministic: the same graph always produces the same bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Dict, Tuple, Union

import numpy as np

from .generators import ElevationGrid, grid_turn_model
from .graph import (
    FunctionalQuadratic,
    QuadGraph,
    StoredQuadratic,
    slot_successor_arcs,
)

TagFactory = Callable[[str, QuadGraph], FunctionalQuadratic]

FUNCTIONAL_TAGS: Dict[str, TagFactory] = {}


def register_functional_tag(prefix: str, factory: TagFactory) -> None:
    """Register a factory for tags whose prefix (before ':') matches."""
    FUNCTIONAL_TAGS[prefix] = factory


def resolve_functional_tag(tag: str, g: QuadGraph) -> FunctionalQuadratic:
    prefix = tag.split(":", 1)[0]
    factory = FUNCTIONAL_TAGS.get(prefix)
    if factory is None:
        raise ValueError(f"unknown functional quadratic tag {tag!r}")
    return factory(tag, g)


def _zero_factory(tag: str, g: QuadGraph) -> FunctionalQuadratic:
    return FunctionalQuadratic(
        lambda i, j, k: 0.0,
        tag="zero",
        pair_class=np.zeros(g.arc_count, dtype=np.uint16),
        pair_table=np.zeros((1, 1)),
    )


def _turn_factory(tag: str, g: QuadGraph) -> FunctionalQuadratic:
    parts = tag.split(":")
    wrap = False
    if parts and parts[-1] == "wrap":
        wrap = True
        parts = parts[:-1]
    if len(parts) != 4:
        raise ValueError(f"malformed turn tag {tag!r}")
    rows = int(parts[1])
    cols = int(parts[2])
    weight = float(parts[3])
    if rows * cols != g.node_count:
        raise ValueError(
            f"turn tag {tag!r} describes {rows * cols} nodes, graph has {g.node_count}"
        )
    return grid_turn_model(g, rows, cols, weight, wrap)


register_functional_tag("zero", _zero_factory)
register_functional_tag("turn", _turn_factory)


def write_aqg(g: QuadGraph, path: Union[str, Path]) -> None:
    """Write a graph to ``path``; stored models emit their nonzero triples."""
    path = Path(path)
    quad = g.quad
    if isinstance(quad, StoredQuadratic):
        nz = np.nonzero(quad.values)[0]
        header_quad = str(nz.shape[0])
    else:
        if quad.tag is None or any(ch.isspace() for ch in quad.tag):
            raise ValueError(
                "functional quadratic model has no writable tag; "
                "materialize it to store explicit triples"
            )
        header_quad = f"FUNC {quad.tag}"
    chunks = [
        "AQG 1\n",
        f"nodes {g.node_count} arcs {g.arc_count} quad {header_quad}\n",
    ]
    tails = g.arc_tail.tolist()
    heads = g.arc_head.tolist()
    costs = g.arc_cost.tolist()
    lines = [f"{tails[a]} {heads[a]} {costs[a]!r}" for a in range(g.arc_count)]
    if lines:
        chunks.append("\n".join(lines))
        chunks.append("\n")
    if isinstance(quad, StoredQuadratic) and nz.shape[0]:
        lengths = np.diff(g.out_start)[g.arc_head]
        a1_rep = np.repeat(np.arange(g.arc_count, dtype=np.int64), lengths)
        a2_seq = slot_successor_arcs(g)
        i_arr = g.arc_tail[a1_rep[nz]].tolist()
        j_arr = g.arc_head[a1_rep[nz]].tolist()
        k_arr = g.arc_head[a2_seq[nz]].tolist()
        v_arr = quad.values[nz].tolist()
        qlines = [
            f"{i_arr[p]} {j_arr[p]} {k_arr[p]} {v_arr[p]!r}" for p in range(nz.shape[0])
        ]
        chunks.append("\n".join(qlines))
        chunks.append("\n")
    path.write_text("".join(chunks), encoding="utf-8")


def read_aqg(path: Union[str, Path]) -> QuadGraph:
    """Parse an ``.aqg`` file back into a :class:`QuadGraph`."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        magic = fh.readline().split()
        if magic != ["AQG", "1"]:
            raise ValueError(f"{path}: not an AQG version 1 file")
        header = fh.readline().split()
        if len(header) < 6 or header[0] != "nodes" or header[2] != "arcs" or header[4] != "quad":
            raise ValueError(f"{path}: malformed header line")
        n = int(header[1])
        m = int(header[3])
        func_tag = None
        k = 0
        if header[5] == "FUNC":
            if len(header) != 7:
                raise ValueError(f"{path}: FUNC header needs exactly one tag")
            func_tag = header[6]
        else:
            k = int(header[5])
        tails = np.empty(m, dtype=np.int64)
        heads = np.empty(m, dtype=np.int64)
        costs = np.empty(m, dtype=np.float64)
        for a in range(m):
            parts = fh.readline().split()
            if len(parts) != 3:
                raise ValueError(f"{path}: bad arc line {a + 1}")
            tails[a] = int(parts[0])
            heads[a] = int(parts[1])
            costs[a] = float(parts[2])
        g = QuadGraph.from_arrays(n, tails, heads, costs, None)
        if func_tag is not None:
            return g._with_quad(resolve_functional_tag(func_tag, g))
        if k == 0:
            return g
        ti = np.empty(k, dtype=np.int64)
        tj = np.empty(k, dtype=np.int64)
        tk = np.empty(k, dtype=np.int64)
        tv = np.empty(k, dtype=np.float64)
        for q in range(k):
            parts = fh.readline().split()
            if len(parts) != 4:
                raise ValueError(f"{path}: bad quadratic line {q + 1}")
            ti[q] = int(parts[0])
            tj[q] = int(parts[1])
            tk[q] = int(parts[2])
            tv[q] = float(parts[3])
    keys = g.arc_tail * n + g.arc_head  # ascending by construction
    a1 = np.searchsorted(keys, ti * n + tj)
    a2 = np.searchsorted(keys, tj * n + tk)
    if (
        a1.max(initial=-1) >= m
        or a2.max(initial=-1) >= m
        or not np.all((keys[np.minimum(a1, m - 1)] == ti * n + tj))
        or not np.all((keys[np.minimum(a2, m - 1)] == tj * n + tk))
    ):
        raise ValueError(f"{path}: quadratic triple references a missing arc")
    values = np.zeros(g.quad_arc_count)
    values[g.qslot_start[a1] + a2 - g.out_start[tj]] = tv
    return g._with_quad(StoredQuadratic(values))


def read_elevation_csv(
    path: Union[str, Path],
    cell_size: float = 1.0,
    origin: Tuple[float, float] = (0.0, 0.0),
) -> ElevationGrid:
    """Load an N x M comma-separated matrix of elevations."""
    values = np.loadtxt(Path(path), delimiter=",", ndmin=2, dtype=np.float64)
    return ElevationGrid(values=values, cell_size=cell_size, origin=origin)

"""Compiled search kernels.

Hot loops for the arc-label searches and the linear node Dijkstra, compiled
with numba when it is importable.  The pure-Python mirrors live in
``solvers``; both sides perform the same float64 operations in the same
order, so their results agree bitwise (tests enforce this).

The priority queue is a binary min-heap over (key, item) with lexicographic
comparison, decrease-key by re-insertion, and stale-entry skipping.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


QMODE_STORED = 0
QMODE_PAIR = 1


@njit(cache=True)
def _heap_push(keys, items, size, key, item):
    if size == keys.shape[0]:
        new_keys = np.empty(size * 2, dtype=np.float64)
        new_items = np.empty(size * 2, dtype=np.int64)
        new_keys[:size] = keys
        new_items[:size] = items
        keys = new_keys
        items = new_items
    pos = size
    keys[pos] = key
    items[pos] = item
    size += 1
    while pos > 0:
        parent = (pos - 1) >> 1
        if keys[pos] < keys[parent] or (
            keys[pos] == keys[parent] and items[pos] < items[parent]
        ):
            keys[pos], keys[parent] = keys[parent], keys[pos]
            items[pos], items[parent] = items[parent], items[pos]
            pos = parent
        else:
            break
    return keys, items, size


@njit(cache=True)
def _heap_pop(keys, items, size):
    key = keys[0]
    item = items[0]
    size -= 1
    keys[0] = keys[size]
    items[0] = items[size]
    pos = 0
    while True:
        left = 2 * pos + 1
        if left >= size:
            break
        right = left + 1
        child = left
        if right < size and (
            keys[right] < keys[left]
            or (keys[right] == keys[left] and items[right] < items[left])
        ):
            child = right
        if keys[child] < keys[pos] or (
            keys[child] == keys[pos] and items[child] < items[pos]
        ):
            keys[pos], keys[child] = keys[child], keys[pos]
            items[pos], items[child] = items[child], items[pos]
            pos = child
        else:
            break
    return key, item, size


@njit(cache=True)
def aq_search(
    out_start,
    arc_tail,
    arc_head,
    arc_cost,
    qmode,
    qslot_start,
    qvals,
    pair_class,
    pair_table,
    src,
    bound,
    use_bound,
    target,
    early_stop,
):
    """Arc-label search; with use_bound it is guided by per-node lower bounds.

    Returns (dist, pred, popped, relaxations, updated).  pred uses -1 for the
    virtual start arc and -2 for unlabeled.  Arcs whose head has an infinite
    bound are skipped when use_bound is set: no walk through them reaches the
    target.
    """
    inf = np.inf
    m = arc_cost.shape[0]
    dist = np.full(m, inf)
    pred = np.full(m, -2, dtype=np.int64)
    heap_keys = np.empty(1024, dtype=np.float64)
    heap_items = np.empty(1024, dtype=np.int64)
    heap_size = 0
    popped = 1  # the virtual start arc is seeded alone and extracted first
    relaxations = 0
    updated = 0

    for a2 in range(out_start[src], out_start[src + 1]):
        head2 = arc_head[a2]
        if use_bound and bound[head2] == inf:
            continue
        relaxations += 1
        cand = arc_cost[a2]  # zero label and zero interaction from the start arc
        if cand < dist[a2]:
            dist[a2] = cand
            pred[a2] = -1
            updated += 1
            key = cand + bound[head2] if use_bound else cand
            heap_keys, heap_items, heap_size = _heap_push(
                heap_keys, heap_items, heap_size, key, a2
            )

    while heap_size > 0:
        key, a, heap_size = _heap_pop(heap_keys, heap_items, heap_size)
        j = arc_head[a]
        dist_a = dist[a]
        expected = dist_a + bound[j] if use_bound else dist_a
        if key != expected:
            continue  # stale entry superseded by a later decrease
        popped += 1
        if early_stop and j == target:
            break
        i = arc_tail[a]
        lo = out_start[j]
        hi = out_start[j + 1]
        base = qslot_start[a] - lo if qmode == QMODE_STORED else 0
        cls_a = pair_class[a] if qmode == QMODE_PAIR else 0
        for a2 in range(lo, hi):
            head2 = arc_head[a2]
            if use_bound and bound[head2] == inf:
                continue
            relaxations += 1
            if qmode == QMODE_STORED:
                q = qvals[base + a2]
            else:
                q = pair_table[cls_a, pair_class[a2]]
            cand = dist_a + arc_cost[a2] + q
            if cand < dist[a2]:
                dist[a2] = cand
                pred[a2] = a
                updated += 1
                key2 = cand + bound[head2] if use_bound else cand
                heap_keys, heap_items, heap_size = _heap_push(
                    heap_keys, heap_items, heap_size, key2, a2
                )

    return dist, pred, popped, relaxations, updated


@njit(cache=True)
def node_dijkstra(
    num_nodes,
    indptr,
    to_node,
    weight,
    seed_nodes,
    seed_dists,
    stop_mask,
    use_stop,
):
    """Linear Dijkstra over a CSR digraph with seeded start distances.

    Returns (dist, pred_node, popped, relaxations, updated); pred is -1 for
    seeds and unreached nodes.  With use_stop the search halts right after
    extracting any node whose stop_mask entry is set.
    """
    dist = np.full(num_nodes, np.inf)
    pred = np.full(num_nodes, -1, dtype=np.int64)
    heap_keys = np.empty(1024, dtype=np.float64)
    heap_items = np.empty(1024, dtype=np.int64)
    heap_size = 0
    popped = 0
    relaxations = 0
    updated = 0

    for idx in range(seed_nodes.shape[0]):
        u = seed_nodes[idx]
        d = seed_dists[idx]
        if d < dist[u]:
            dist[u] = d
            heap_keys, heap_items, heap_size = _heap_push(
                heap_keys, heap_items, heap_size, d, u
            )

    while heap_size > 0:
        key, u, heap_size = _heap_pop(heap_keys, heap_items, heap_size)
        if key != dist[u]:
            continue
        popped += 1
        if use_stop and stop_mask[u]:
            break
        for e in range(indptr[u], indptr[u + 1]):
            relaxations += 1
            v = to_node[e]
            cand = key + weight[e]
            if cand < dist[v]:
                dist[v] = cand
                pred[v] = u
                updated += 1
                heap_keys, heap_items, heap_size = _heap_push(
                    heap_keys, heap_items, heap_size, cand, v
                )

    return dist, pred, popped, relaxations, updated

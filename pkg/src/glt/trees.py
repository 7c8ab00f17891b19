"""Uniform spanning trees via Wilson's loop-erased random walk."""

from __future__ import annotations

import numpy as np

from .errors import DisconnectedGraphError, InputError
from .graph import Graph, is_connected
from .rng import ensure_rng

__all__ = ["sample_spanning_tree", "random_select", "edge_inclusion_frequency"]

_BUFFER = 4096


def _walk_tables(graph: Graph):
    cached = graph._cache.get("walk")
    if cached is None:
        if graph.num_nodes == 0:
            raise InputError("spanning tree of an empty graph")
        if not is_connected(graph):
            raise DisconnectedGraphError("spanning trees need a connected graph")
        cached = (graph.indptr.tolist(), graph.indices.tolist(), graph.edge_ids.tolist())
        graph._cache["walk"] = cached
    return cached


def sample_spanning_tree(graph: Graph, rng) -> np.ndarray:
    """Draw a uniformly random spanning tree.

    Returns the ``n - 1`` tree edge ids in ascending order (index into
    ``graph.edges``). The root is drawn from ``rng``; nodes are then
    attached in id order by loop-erased walks.
    """
    rng = ensure_rng(rng)
    indptr, indices, eids = _walk_tables(graph)
    n = graph.num_nodes
    root = int(rng.integers(n))
    in_tree = [False] * n
    in_tree[root] = True
    # adjacency position of the edge each node leaves by
    nxt = [0] * n
    buf = rng.random(_BUFFER).tolist()
    k = 0
    for start in range(n):
        u = start
        while not in_tree[u]:
            if k == _BUFFER:
                buf = rng.random(_BUFFER).tolist()
                k = 0
            lo = indptr[u]
            j = lo + int(buf[k] * (indptr[u + 1] - lo))
            k += 1
            nxt[u] = j
            u = indices[j]
        # overwriting nxt while walking already erased the loops
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = indices[nxt[u]]
    tree = [eids[nxt[u]] for u in range(n) if u != root]
    return np.sort(np.array(tree, dtype=np.int64))


def random_select(edges, count: int, rng) -> np.ndarray:
    """Uniform sample of ``count`` items without replacement.

    ``edges`` is an array of edge ids or an ``(k, 2)`` edge array; the
    selection keeps the input order.
    """
    rng = ensure_rng(rng)
    edges = np.asarray(edges)
    if count < 0 or count > len(edges):
        raise InputError(f"cannot select {count} of {len(edges)} edges")
    idx = np.sort(rng.choice(len(edges), size=count, replace=False))
    return edges[idx]


def edge_inclusion_frequency(graph: Graph, trials: int, rng) -> np.ndarray:
    """Fraction of ``trials`` spanning trees containing each edge, by edge id."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    rng = ensure_rng(rng)
    counts = np.zeros(graph.num_edges, dtype=np.int64)
    for _ in range(trials):
        counts[sample_spanning_tree(graph, rng)] += 1
    return counts / trials

"""Immutable undirected simple graphs in compressed adjacency form.

Nodes are dense integers ``0..n-1``. Every undirected edge has an id in
``0..m-1``; ``Graph.edges[e]`` is its canonical ``(u, v)`` pair with
``u < v`` and edges are stored in lexicographic order, so edge ids are
stable for a given edge set.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import InputError, ParseError

__all__ = [
    "Graph",
    "from_edges",
    "load_edge_list",
    "save_edge_list",
    "load_labels",
    "save_labels",
    "as_labels",
    "is_connected",
    "components",
    "largest_component",
    "exact_triangle_count",
    "edge_triangle_count",
    "edge_triangle_counts",
    "wedge_count",
    "adjacency_multiply",
    "laplacian_multiply",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Undirected simple graph stored as CSR adjacency.

    Construct with :func:`from_edges` rather than directly.

    Attributes:
        num_nodes: number of nodes ``n``.
        indptr: ``(n+1,)`` offsets into ``indices``.
        indices: concatenated sorted neighbor lists, length ``2m``.
        edge_ids: edge id of each adjacency entry, parallel to ``indices``.
        edges: ``(m, 2)`` canonical edge array, lexicographically sorted.
    """

    __slots__ = ("num_nodes", "indptr", "indices", "edge_ids", "edges", "_adj", "_cache")

    def __init__(self, num_nodes: int, edges: np.ndarray):
        # edges must already be canonical, unique and sorted
        n = int(num_nodes)
        m = len(edges)
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((dst, src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        self.num_nodes = n
        self.indptr = _frozen(indptr)
        self.indices = _frozen(dst[order].astype(np.int64))
        self.edge_ids = _frozen(eid[order].astype(np.int64))
        self.edges = _frozen(edges.astype(np.int64).reshape(m, 2))
        self._adj = None
        # derived read-only data (python lists, connectivity); safe since immutable
        self._cache = {}

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def n(self) -> int:
        return self.num_nodes

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def edge_id(self, u: int, v: int) -> int:
        """Id of edge ``(u, v)``; raises :class:`InputError` for non-edges."""
        self._check_node(u)
        self._check_node(v)
        lo, hi = self.indptr[u], self.indptr[u + 1]
        pos = lo + int(np.searchsorted(self.indices[lo:hi], v))
        if pos >= hi or self.indices[pos] != v:
            raise InputError(f"({u}, {v}) is not an edge")
        return int(self.edge_ids[pos])

    def has_edge(self, u: int, v: int) -> bool:
        try:
            self.edge_id(u, v)
        except InputError:
            return False
        return True

    def _check_node(self, u: int) -> None:
        if not 0 <= u < self.num_nodes:
            raise InputError(f"node {u} out of range for n={self.num_nodes}")

    def adjacency(self) -> sp.csr_matrix:
        """Sparse 0/1 adjacency matrix (cached)."""
        if self._adj is None:
            data = np.ones(len(self.indices))
            n = self.num_nodes
            self._adj = sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))
        return self._adj

    def laplacian(self) -> sp.csr_matrix:
        return (sp.diags(self.degrees.astype(float)) - self.adjacency()).tocsr()

    def edge_subgraph(self, edge_ids: Iterable[int]) -> Graph:
        """Spanning subgraph (same node set) on the given edge ids."""
        if not isinstance(edge_ids, np.ndarray):
            edge_ids = np.fromiter(edge_ids, dtype=np.int64)
        ids = np.unique(edge_ids.astype(np.int64))
        return Graph(self.num_nodes, self.edges[ids])

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edges]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.num_nodes == other.num_nodes and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.num_nodes, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.num_nodes}, m={self.num_edges})"


def from_edges(n: int, edges: Sequence[tuple[int, int]] | np.ndarray) -> Graph:
    """Build a graph, dropping self-loops and merging duplicate edges."""
    if n < 0:
        raise InputError(f"negative node count {n}")
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError("edges must be a sequence of (u, v) pairs")
    if len(arr) and (arr.min() < 0 or arr.max() >= n):
        bad = arr[(arr < 0).any(axis=1) | (arr >= n).any(axis=1)][0]
        raise InputError(f"edge ({bad[0]}, {bad[1]}) has an endpoint outside 0..{n - 1}")
    arr = arr[arr[:, 0] != arr[:, 1]]
    arr = np.sort(arr, axis=1)
    arr = np.unique(arr, axis=0) if len(arr) else arr.reshape(0, 2)
    return Graph(n, arr)


_NODES_HEADER = re.compile(r"^#\s*nodes\s*=\s*(\d+)\s*$")


def load_edge_list(path: str | Path, remap: bool = False):
    """Read a whitespace-separated ``u v`` edge list.

    Lines starting with ``#`` are comments; ``# nodes=N`` fixes the node
    count, otherwise ``n = 1 + max id``. With ``remap=True`` external ids
    are compacted to ``0..n-1`` in ascending order and ``(graph, ids)`` is
    returned where ``ids[new] = old``.
    """
    declared = None
    pairs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                match = _NODES_HEADER.match(line)
                if match:
                    declared = int(match.group(1))
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected 2 fields, got {len(parts)}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer node id in {line!r}", lineno) from None
            if u < 0 or v < 0:
                raise ParseError(f"negative node id in {line!r}", lineno)
            pairs.append((u, v))
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if remap:
        ids, inverse = np.unique(arr, return_inverse=True)
        n = len(ids) if declared is None else max(declared, len(ids))
        return from_edges(n, inverse.reshape(-1, 2)), ids
    n = int(arr.max()) + 1 if len(arr) else 0
    if declared is not None:
        if declared < n:
            raise ParseError(f"header declares {declared} nodes but ids reach {n - 1}")
        n = declared
    return from_edges(n, arr)


def save_edge_list(graph: Graph, path: str | Path) -> None:
    """Write ``graph`` with a ``# nodes=N`` header so isolated nodes survive."""
    lines = [f"# nodes={graph.num_nodes}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    Path(path).write_text("\n".join(lines) + "\n")


def as_labels(values: Sequence[int] | np.ndarray) -> np.ndarray:
    """Relabel class ids to be contiguous from 0, preserving order of ids."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise InputError("labels must be one-dimensional")
    _, inverse = np.unique(arr, return_inverse=True)
    return inverse.astype(np.int64)


def load_labels(path: str | Path) -> np.ndarray:
    """One integer per line; line k holds the label of node k."""
    out = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise ParseError(f"non-integer label {line!r}", lineno) from None
    return as_labels(np.array(out, dtype=np.int64))


def save_labels(labels: Sequence[int] | np.ndarray, path: str | Path) -> None:
    Path(path).write_text("".join(f"{int(y)}\n" for y in labels))


def components(graph: Graph) -> tuple[int, np.ndarray]:
    """Number of connected components and per-node component labels."""
    if graph.num_nodes == 0:
        return 0, np.zeros(0, dtype=np.int64)
    return connected_components(graph.adjacency(), directed=False)


def is_connected(graph: Graph) -> bool:
    return components(graph)[0] <= 1


def largest_component(graph: Graph) -> tuple[Graph, np.ndarray]:
    """Largest connected component and the array mapping new ids to old ids.

    Ties between equally large components go to the one containing the
    smallest node id.
    """
    count, labels = components(graph)
    if count <= 1:
        return graph, np.arange(graph.num_nodes)
    sizes = np.bincount(labels)
    keep = int(np.argmax(sizes))
    nodes = np.flatnonzero(labels == keep)
    relabel = np.full(graph.num_nodes, -1, dtype=np.int64)
    relabel[nodes] = np.arange(len(nodes))
    mask = labels[graph.edges[:, 0]] == keep
    sub = relabel[graph.edges[mask]]
    return from_edges(len(nodes), sub), nodes


def edge_triangle_count(graph: Graph, u: int, v: int) -> int:
    """Number of triangles containing edge ``(u, v)``."""
    graph.edge_id(u, v)
    common = np.intersect1d(graph.neighbors(u), graph.neighbors(v), assume_unique=True)
    return len(common)


def edge_triangle_counts(graph: Graph) -> np.ndarray:
    """Triangles on every edge, indexed by edge id.

    Entry ``(u, v)`` of ``A @ A`` counts common neighbours; reading it off
    on the edge set is the same as intersecting the two neighbour lists.
    """
    if graph.num_edges == 0:
        return np.zeros(0, dtype=np.int64)
    a = graph.adjacency()
    common = (a @ a).multiply(a).tocsr()
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    return np.asarray(common[u, v]).ravel().astype(np.int64)


def exact_triangle_count(graph: Graph) -> int:
    return int(edge_triangle_counts(graph).sum() // 3)


def wedge_count(graph: Graph) -> int:
    """Paths of length two, ``sum_i d_i (d_i - 1) / 2``."""
    d = graph.degrees
    return int((d * (d - 1)).sum() // 2)


def _check_vector(graph: Graph, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != graph.num_nodes:
        raise InputError(f"vector length {x.shape[0]} != n={graph.num_nodes}")
    return x


def adjacency_multiply(graph: Graph, x) -> np.ndarray:
    x = _check_vector(graph, x)
    return graph.adjacency() @ x


def laplacian_multiply(graph: Graph, x) -> np.ndarray:
    x = _check_vector(graph, x)
    d = graph.degrees.astype(float)
    if x.ndim > 1:
        d = d[:, None]
    return d * x - graph.adjacency() @ x

"""Shared corpus graphs and brute-force oracles for the test suite."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from glt.generators import SbmSpec, generate_sbm, named_graph
from glt.graph import Graph, from_edges


def k4_minus_edge() -> Graph:
    return from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def two_triangles() -> Graph:
    return from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def triangles_with_bridge() -> Graph:
    return from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def small_corpus() -> dict[str, Graph]:
    """Connected graphs with at most 8 nodes."""
    return {
        "path4": named_graph("path", 4),
        "star5": named_graph("star", 5),
        "ring6": named_graph("ring", 6),
        "k3": named_graph("complete", 3),
        "k4": named_graph("complete", 4),
        "k5": named_graph("complete", 5),
        "k4-e": k4_minus_edge(),
        "barbell3": named_graph("barbell", 3),
        "bridged_triangles": triangles_with_bridge(),
        "wheel6": from_edges(6, [(0, i) for i in range(1, 6)] + [(i, i % 5 + 1) for i in range(1, 6)]),
    }


def corpus() -> dict[str, Graph]:
    """Small corpus plus larger structured and random graphs (n <= 500)."""
    out = dict(small_corpus())
    out.update(
        {
            "karate": named_graph("karate"),
            "path30": named_graph("path", 30),
            "star20": named_graph("star", 20),
            "ring40": named_graph("ring", 40),
            "complete12": named_graph("complete", 12),
            "barbell10": named_graph("barbell", 10),
            "sbm120": generate_sbm(SbmSpec(120, k=4, snr=5, avg_degree=12, seed=3))[0],
            "sbm300": generate_sbm(SbmSpec(300, k=5, snr=5, avg_degree=20, seed=4))[0],
        }
    )
    return out


@pytest.fixture(scope="session")
def karate() -> Graph:
    return named_graph("karate")


@pytest.fixture(scope="session")
def sbm1000():
    return generate_sbm(SbmSpec(1000, k=10, snr=5, avg_degree=100, seed=0))


# --- oracles ----------------------------------------------------------------


def brute_triangles(graph: Graph) -> int:
    edges = set(graph.edge_list())
    return sum(
        1
        for a, b, c in itertools.combinations(range(graph.num_nodes), 3)
        if (a, b) in edges and (a, c) in edges and (b, c) in edges
    )


def is_spanning_tree(n: int, edges) -> bool:
    edges = [tuple(e) for e in edges]
    if len(edges) != n - 1:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def enumerate_spanning_trees(graph: Graph) -> list[tuple[int, ...]]:
    """Every spanning tree as a sorted tuple of edge ids, by exhaustive search."""
    n, edges = graph.num_nodes, graph.edges.tolist()
    return [
        ids
        for ids in itertools.combinations(range(len(edges)), n - 1)
        if is_spanning_tree(n, [edges[i] for i in ids])
    ]


def dense_pinv_resistance(graph: Graph, u: int, v: int) -> float:
    lap = graph.laplacian().toarray()
    pinv = np.linalg.pinv(lap)
    return float(pinv[u, u] + pinv[v, v] - 2 * pinv[u, v])


def bfs_diameter(graph: Graph) -> int:
    best = 0
    for s in range(graph.num_nodes):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in graph.neighbors(u).tolist():
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        best = max(best, max(dist.values()))
    return best

"""Edge-budgeted sparsifiers: spanning-tree unions and weighted baselines.

Every method returns a spanning subgraph of its input (same node set,
subset of the edges) with exactly ``target`` edges. Edges are never
reweighted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DisconnectedGraphError, InfeasibleBudgetError, InputError, NumericalError
from .graph import Graph, is_connected
from .spectral import principal_eigenpair
from .rng import ensure_rng
from .trees import random_select, sample_spanning_tree

__all__ = [
    "METHODS",
    "WeightedEdges",
    "SparsifyRequest",
    "target_edges",
    "ktree",
    "one_tree",
    "random_baseline",
    "spectral_radius_weights",
    "edge_significance_weights",
    "weighted_backbone",
    "sparsify",
]

METHODS = ("ktree", "one_tree", "random", "spectral_radius", "edge_significance")

# which end of the weight ranking each weighted baseline keeps
BASELINE_KEEP = {"spectral_radius": "lowest", "edge_significance": "highest"}


@dataclass(frozen=True)
class WeightedEdges:
    """One score per edge of ``graph``, aligned with ``graph.edges``."""

    graph: Graph
    weights: np.ndarray

    def __post_init__(self):
        if self.weights.shape != (self.graph.num_edges,):
            raise InputError("need exactly one weight per edge")
        if not np.all(np.isfinite(self.weights)):
            raise NumericalError("edge weights must be finite")

    def entries(self) -> list[tuple[int, int, float]]:
        return [(int(u), int(v), float(w)) for (u, v), w in zip(self.graph.edges, self.weights)]

    def scaled(self, factor: float) -> WeightedEdges:
        return WeightedEdges(self.graph, self.weights * factor)


def target_edges(n: int, avg_degree: float) -> int:
    """Edge budget ``round(d * n / 2)``, halves rounded away from zero."""
    x = avg_degree * n / 2
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


@dataclass(frozen=True)
class SparsifyRequest:
    method: str
    target: int | None = None
    avg_degree: float | None = None
    seed: int = 42

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}; choose from {METHODS}")
        if (self.target is None) == (self.avg_degree is None):
            raise InputError("give exactly one of target or avg_degree")

    def budget(self, graph: Graph) -> int:
        if self.target is not None:
            return int(self.target)
        return target_edges(graph.num_nodes, self.avg_degree)


def _check_tree_budget(graph: Graph, target: int) -> None:
    n, m = graph.num_nodes, graph.num_edges
    if n == 0:
        raise InputError("empty graph")
    if not is_connected(graph):
        raise DisconnectedGraphError("connectivity-preserving sparsifiers need a connected graph")
    if not n - 1 <= target <= m:
        raise InfeasibleBudgetError(f"target {target} outside [{n - 1}, {m}]")


def ktree(graph: Graph, target: int, rng) -> Graph:
    """Union of fresh uniform spanning trees, truncated to ``target`` edges.

    Trees are added whole while they fit; once the next tree's new edges
    would overshoot, a uniform subset of them fills the remaining budget.
    """
    _check_tree_budget(graph, target)
    rng = ensure_rng(rng)
    chosen = np.zeros(graph.num_edges, dtype=bool)
    size = 0
    while size < target:
        tree = sample_spanning_tree(graph, rng)
        fresh = tree[~chosen[tree]]
        need = target - size
        if len(fresh) > need:
            fresh = random_select(fresh, need, rng)
        chosen[fresh] = True
        size += len(fresh)
    return graph.edge_subgraph(np.flatnonzero(chosen))


def one_tree(graph: Graph, target: int, rng) -> Graph:
    """One uniform spanning tree plus uniformly chosen non-tree edges."""
    _check_tree_budget(graph, target)
    rng = ensure_rng(rng)
    tree = sample_spanning_tree(graph, rng)
    rest = np.setdiff1d(np.arange(graph.num_edges), tree, assume_unique=True)
    extra = random_select(rest, target - len(tree), rng)
    return graph.edge_subgraph(np.concatenate([tree, extra]))


def random_baseline(graph: Graph, target: int, rng) -> Graph:
    """Uniform ``target``-subset of the edges; may disconnect the graph."""
    if not 0 <= target <= graph.num_edges:
        raise InfeasibleBudgetError(f"target {target} outside [0, {graph.num_edges}]")
    rng = ensure_rng(rng)
    return graph.edge_subgraph(random_select(np.arange(graph.num_edges), target, rng))


def spectral_radius_weights(graph: Graph) -> WeightedEdges:
    """First-order change of the spectral radius per edge, ``2 x_u x_v``."""
    if not is_connected(graph):
        raise DisconnectedGraphError("spectral radius weights need a connected graph")
    if graph.num_edges == 0:
        return WeightedEdges(graph, np.zeros(0))
    _, x = principal_eigenpair(graph)
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    return WeightedEdges(graph, 2.0 * x[u] * x[v])


def edge_significance_weights(graph: Graph) -> WeightedEdges:
    """Modularity contribution of each edge, ``1 - d_u d_v / 2m``."""
    m = graph.num_edges
    if m == 0:
        raise InputError("edge significance needs at least one edge")
    d = graph.degrees.astype(float)
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    return WeightedEdges(graph, 1.0 - d[u] * d[v] / (2.0 * m))


def _find(parent: list[int], x: int) -> int:
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def weighted_backbone(graph: Graph, weights: WeightedEdges, target: int, keep: str = "highest") -> Graph:
    """Extremal spanning tree plus the best remaining edges.

    With ``keep="highest"`` this is a maximum-weight spanning tree
    (Kruskal on descending weight) topped up with the heaviest non-tree
    edges; ``keep="lowest"`` mirrors it. Ties fall back to edge id order.
    """
    if keep not in ("highest", "lowest"):
        raise InputError(f"keep must be 'highest' or 'lowest', got {keep!r}")
    if weights.graph is not graph and weights.graph != graph:
        raise InputError("weights were computed for a different graph")
    _check_tree_budget(graph, target)
    w = weights.weights
    key = -w if keep == "highest" else w
    order = np.lexsort((np.arange(len(w)), key))
    parent = list(range(graph.num_nodes))
    in_tree = np.zeros(graph.num_edges, dtype=bool)
    edges = graph.edges.tolist()
    taken = 0
    for e in order.tolist():
        u, v = edges[e]
        ru, rv = _find(parent, u), _find(parent, v)
        if ru != rv:
            parent[ru] = rv
            in_tree[e] = True
            taken += 1
            if taken == graph.num_nodes - 1:
                break
    rest = order[~in_tree[order]][: target - taken]
    return graph.edge_subgraph(np.concatenate([np.flatnonzero(in_tree), rest]))


def _weighted(weigher: Callable[[Graph], WeightedEdges], default_keep: str):
    def run(graph: Graph, target: int, rng=None, keep: str = default_keep) -> Graph:
        _check_tree_budget(graph, target)
        return weighted_backbone(graph, weigher(graph), target, keep)

    return run


_DISPATCH = {
    "ktree": ktree,
    "one_tree": one_tree,
    "random": random_baseline,
    "spectral_radius": _weighted(spectral_radius_weights, BASELINE_KEEP["spectral_radius"]),
    "edge_significance": _weighted(edge_significance_weights, BASELINE_KEEP["edge_significance"]),
}

ALIASES = {"1tree": "one_tree", "onetree": "one_tree", "k_tree": "ktree"}


def canonical_method(name: str) -> str:
    name = ALIASES.get(name.lower(), name.lower())
    if name not in _DISPATCH:
        raise InputError(f"unknown method {name!r}; choose from {METHODS}")
    return name


def sparsify(graph: Graph, method: str, target: int, rng=None, **kwargs) -> Graph:
    """Run ``method`` on ``graph`` with an edge budget of ``target``."""
    return _DISPATCH[canonical_method(method)](graph, target, rng, **kwargs)

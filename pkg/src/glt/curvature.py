"""Edge and node curvature: augmented Forman and link resistance curvature."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DisconnectedGraphError, InputError
from .graph import Graph, edge_triangle_count, edge_triangle_counts, is_connected
from .spectral import edge_effective_resistances, format_value, pair_effective_resistance

__all__ = [
    "CurvatureReport",
    "augmented_forman",
    "forman_all",
    "link_resistance_curvature",
    "resistance_curvature_all",
    "edge_resistance_total",
    "curvature_report",
    "write_curvature_tsv",
]


def _check_gamma(gamma: float) -> None:
    if not gamma > 0:
        raise InputError(f"gamma must be positive, got {gamma}")


def augmented_forman(graph: Graph, u: int, v: int, gamma: float = 1.0) -> float:
    """``4 - d_u - d_v + 3 * gamma * triangles(u, v)`` for an existing edge."""
    _check_gamma(gamma)
    tri = edge_triangle_count(graph, u, v)
    d = graph.degrees
    return float(4 - d[u] - d[v] + 3.0 * gamma * tri)


def forman_all(graph: Graph, gamma: float = 1.0) -> np.ndarray:
    """Augmented Forman curvature of every edge, by edge id."""
    _check_gamma(gamma)
    d = graph.degrees
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    return 4.0 - d[u] - d[v] + 3.0 * gamma * edge_triangle_counts(graph)


def link_resistance_curvature(graph: Graph, i: int) -> float:
    """``1 - sum of incident edge resistances / 2``."""
    graph._check_node(i)
    if not is_connected(graph):
        raise DisconnectedGraphError("link resistance curvature is undefined on a disconnected graph")
    total = sum(pair_effective_resistance(graph, i, int(j)) for j in graph.neighbors(i))
    return 1.0 - 0.5 * total


def resistance_curvature_all(graph: Graph, resistances: np.ndarray | None = None) -> np.ndarray:
    if resistances is None:
        resistances = edge_effective_resistances(graph)
    incident = np.zeros(graph.num_nodes)
    np.add.at(incident, graph.edges[:, 0], resistances)
    np.add.at(incident, graph.edges[:, 1], resistances)
    return 1.0 - 0.5 * incident


def edge_resistance_total(graph: Graph) -> float:
    """Sum of effective resistances over the edges (equals ``n - 1`` when connected)."""
    return float(edge_effective_resistances(graph).sum())


@dataclass
class CurvatureReport:
    graph: Graph
    forman: np.ndarray
    resistance_curvature: np.ndarray
    gamma: float = 1.0

    @property
    def mean_forman(self) -> float:
        return float(self.forman.mean()) if len(self.forman) else float("nan")

    @property
    def mean_resistance_curvature(self) -> float:
        return float(self.resistance_curvature.mean()) if len(self.resistance_curvature) else float("nan")


def curvature_report(graph: Graph, gamma: float = 1.0) -> CurvatureReport:
    rc = resistance_curvature_all(graph)
    return CurvatureReport(graph, forman_all(graph, gamma), rc, gamma)


def write_curvature_tsv(report: CurvatureReport, path: str | Path) -> None:
    """Edge rows ``u v F#`` followed by node rows ``i rho``."""
    lines = [f"# gamma={format_value(report.gamma)}"]
    for (u, v), f in zip(report.graph.edges, report.forman):
        lines.append(f"{u}\t{v}\t{format_value(f)}")
    for i, rho in enumerate(report.resistance_curvature):
        lines.append(f"{i}\t{format_value(rho)}")
    Path(path).write_text("\n".join(lines) + "\n")

"""Stochastic block models and a handful of canonical small graphs."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import Graph, from_edges
from .rng import make_rng

__all__ = ["SbmSpec", "sbm_probabilities", "generate_sbm", "named_graph", "parse_named", "NAMED_GRAPHS"]


@dataclass(frozen=True)
class SbmSpec:
    """Planted-partition SBM parameters.

    ``snr`` is the within/between edge probability ratio and ``avg_degree``
    the expected mean degree; both probabilities are derived from them.
    """

    n: int
    k: int = 10
    snr: float = 5.0
    avg_degree: float = 100.0
    seed: int = 0


def sbm_probabilities(spec: SbmSpec) -> tuple[float, float]:
    """Return ``(p_in, p_out)`` for ``spec``; raises on infeasible values."""
    n, k = spec.n, spec.k
    if n < 1 or k < 1 or k > n:
        raise InputError(f"need 1 <= k <= n, got n={n}, k={k}")
    if spec.snr < 1:
        raise InputError(f"snr must be >= 1, got {spec.snr}")
    if spec.avg_degree < 0:
        raise InputError("avg_degree must be non-negative")
    denom = spec.snr * (n / k - 1) + n * (k - 1) / k
    if denom <= 0:
        if spec.avg_degree == 0:
            return 0.0, 0.0
        raise InputError("no node pairs available to reach the requested degree")
    p_out = spec.avg_degree / denom
    p_in = spec.snr * p_out
    # p_in only matters when some class holds a pair of nodes
    if p_out > 1 or (p_in > 1 and n > k):
        raise InputError(f"infeasible SBM: p_in={p_in:.4g}, p_out={p_out:.4g} exceed 1")
    return p_in, p_out


def sbm_labels(n: int, k: int) -> np.ndarray:
    sizes = [len(chunk) for chunk in np.array_split(np.arange(n), k)]
    return np.repeat(np.arange(k), sizes)


def generate_sbm(spec: SbmSpec) -> tuple[Graph, np.ndarray]:
    """Sample an SBM graph and its planted labels (contiguous blocks)."""
    p_in, p_out = sbm_probabilities(spec)
    n = spec.n
    labels = sbm_labels(n, spec.k)
    rng = make_rng(spec.seed, "sbm")
    rows, cols = [], []
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        p = np.where(labels[j] == labels[i], p_in, p_out)
        hit = j[rng.random(len(j)) < p]
        rows.append(np.full(len(hit), i))
        cols.append(hit)
    if rows:
        edges = np.column_stack([np.concatenate(rows), np.concatenate(cols)])
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
    return from_edges(n, edges), labels


KARATE_EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10), (0, 11),
    (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31), (1, 2), (1, 3), (1, 7), (1, 13),
    (1, 17), (1, 19), (1, 21), (1, 30), (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27),
    (2, 28), (2, 32), (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16),
    (6, 16), (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33), (15, 32), (15, 33),
    (18, 32), (18, 33), (19, 33), (20, 32), (20, 33), (22, 32), (22, 33), (23, 25), (23, 27), (23, 29),
    (23, 32), (23, 33), (24, 25), (24, 27), (24, 31), (25, 31), (26, 29), (26, 33), (27, 33), (28, 31),
    (28, 33), (29, 32), (29, 33), (30, 32), (30, 33), (31, 32), (31, 33), (32, 33),
]


def _path(n):
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def _ring(n):
    if n < 3:
        raise InputError("ring needs n >= 3")
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def _complete(n):
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def _star(n):
    # n nodes in total, centre 0
    return from_edges(n, [(0, i) for i in range(1, n)])


def _barbell(n):
    # two K_n joined by the bridge (n-1, n)
    if n < 1:
        raise InputError("barbell needs n >= 1")
    clique = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = clique + [(i + n, j + n) for i, j in clique] + [(n - 1, n)]
    return from_edges(2 * n, edges)


def _karate(n=None):
    return from_edges(34, KARATE_EDGES)


NAMED_GRAPHS = {
    "path": _path,
    "ring": _ring,
    "complete": _complete,
    "star": _star,
    "barbell": _barbell,
    "karate": _karate,
}


def named_graph(name: str, n: int | None = None) -> Graph:
    """Build ``path``, ``ring``, ``complete``, ``star``, ``barbell`` (size ``n``) or ``karate``."""
    try:
        build = NAMED_GRAPHS[name]
    except KeyError:
        raise InputError(f"unknown graph {name!r}; choose from {sorted(NAMED_GRAPHS)}") from None
    if name == "karate":
        return build()
    if n is None or n < 1:
        raise InputError(f"{name} needs a size n >= 1")
    return build(int(n))


_NAMED_RE = re.compile(r"^([a-z]+)(?:[:(](\d+)\)?)?$")


def parse_named(text: str) -> Graph:
    """Parse ``karate``, ``complete:4`` or ``complete(4)``."""
    match = _NAMED_RE.match(text.strip())
    if not match:
        raise InputError(f"cannot parse graph name {text!r}")
    name, size = match.groups()
    return named_graph(name, None if size is None else int(size))

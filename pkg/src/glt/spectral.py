"""Spectral and clustering metrics of a graph, exact or by stochastic Lanczos quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla
from scipy.linalg import eigh_tridiagonal

from .errors import DisconnectedGraphError, InputError, NumericalError, SizeError
from .graph import Graph, components, edge_triangle_counts, exact_triangle_count, is_connected, wedge_count
from .rng import make_rng

__all__ = [
    "DENSE_CAP",
    "SlqConfig",
    "MetricsReport",
    "dense_spectrum",
    "principal_eigenpair",
    "spectral_radius",
    "fiedler",
    "algebraic_connectivity",
    "laplacian_max",
    "total_effective_resistance",
    "pair_effective_resistance",
    "edge_effective_resistances",
    "log_num_spanning_trees",
    "triangle_count",
    "global_clustering_coefficient",
    "local_clustering",
    "avg_local_clustering",
    "slq_trace",
    "compute_metrics",
]

DENSE_CAP = 2000
# below this size the iterative eigensolvers are replaced by a dense one
_SMALL = 64


@dataclass(frozen=True)
class SlqConfig:
    num_probes: int = 100
    lanczos_steps: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.num_probes < 1 or self.lanczos_steps < 1:
            raise InputError("num_probes and lanczos_steps must be >= 1")


def dense_spectrum(graph: Graph, cap: int = DENSE_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Ascending Laplacian and adjacency eigenvalues."""
    if graph.num_nodes > cap:
        raise SizeError(f"dense spectrum capped at n={cap}, got {graph.num_nodes}")
    key = ("spectrum",)
    if key not in graph._cache:
        a = graph.adjacency().toarray()
        lap = np.diag(a.sum(axis=1)) - a
        graph._cache[key] = (np.linalg.eigvalsh(lap), np.linalg.eigvalsh(a))
    return graph._cache[key]


def _laplacian_pinv(graph: Graph) -> np.ndarray:
    key = ("pinv",)
    if key not in graph._cache:
        lap = graph.laplacian().toarray()
        vals, vecs = np.linalg.eigh(lap)
        inv = np.where(vals > 1e-9 * max(1.0, vals[-1]), 1.0 / np.where(vals == 0, 1, vals), 0.0)
        graph._cache[key] = (vecs * inv) @ vecs.T
    return graph._cache[key]


# --- iterative eigensolvers -------------------------------------------------


def principal_eigenpair(graph: Graph, tol: float = 1e-8) -> tuple[float, np.ndarray]:
    """Largest adjacency eigenvalue and its unit eigenvector (non-negative sum)."""
    n = graph.num_nodes
    if n == 0:
        raise InputError("empty graph")
    a = graph.adjacency()
    if n <= _SMALL:
        vals, vecs = np.linalg.eigh(a.toarray())
        val, vec = vals[-1], vecs[:, -1]
    else:
        try:
            vals, vecs = sla.eigsh(a, k=1, which="LA", v0=np.ones(n), tol=1e-14, maxiter=50 * n)
        except sla.ArpackNoConvergence as exc:
            raise NumericalError("principal eigenvector did not converge") from exc
        val, vec = vals[0], vecs[:, 0]
    vec = vec * (1.0 if vec.sum() >= 0 else -1.0)
    vec = vec / np.linalg.norm(vec)
    residual = np.linalg.norm(a @ vec - val * vec)
    if residual > tol * max(1.0, abs(val)):
        raise NumericalError(f"principal eigenvector residual {residual:.3g} above tolerance")
    return float(val), vec


def spectral_radius(graph: Graph) -> float:
    if graph.num_edges == 0:
        raise InputError("spectral radius needs at least one edge")
    return principal_eigenpair(graph)[0]


@dataclass(frozen=True)
class FiedlerResult:
    value: float
    vector: np.ndarray
    residual: float
    connected: bool


def fiedler(graph: Graph) -> FiedlerResult:
    """Second-smallest Laplacian eigenpair with the solver residual.

    Disconnected graphs report ``value=0`` and ``connected=False``.
    """
    n = graph.num_nodes
    if n < 2 or not is_connected(graph):
        return FiedlerResult(0.0, np.zeros(n), 0.0, n == 1)
    lap = graph.laplacian()
    if n <= _SMALL:
        vals, vecs = np.linalg.eigh(lap.toarray())
    else:
        # shift-invert around a point just left of the zero eigenvalue
        v0 = make_rng(0, "fiedler").standard_normal(n)
        try:
            vals, vecs = sla.eigsh(lap.tocsc(), k=2, sigma=-1e-3, which="LM", v0=v0, tol=1e-13)
        except sla.ArpackNoConvergence as exc:
            raise NumericalError("algebraic connectivity did not converge") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    val, vec = float(vals[1]), vecs[:, 1]
    residual = float(np.linalg.norm(lap @ vec - val * vec))
    return FiedlerResult(val, vec, residual, True)


def algebraic_connectivity(graph: Graph) -> float:
    return fiedler(graph).value


def laplacian_max(graph: Graph) -> float:
    """Largest Laplacian eigenvalue."""
    n = graph.num_nodes
    if n <= _SMALL:
        return float(np.linalg.eigvalsh(graph.laplacian().toarray())[-1]) if n else 0.0
    try:
        vals = sla.eigsh(graph.laplacian(), k=1, which="LA", v0=np.ones(n) + np.arange(n) / n,
                         tol=1e-14, maxiter=50 * n, return_eigenvectors=False)
    except sla.ArpackNoConvergence as exc:
        raise NumericalError("largest Laplacian eigenvalue did not converge") from exc
    return float(vals[0])


# --- stochastic Lanczos quadrature -------------------------------------------

# Smallest nonzero Laplacian eigenpairs handled exactly before probing. They
# dominate tr L^+ and tr log L on sparse graphs and Gauss quadrature with few
# nodes resolves them badly.
_LOW_MODES = 8


def _low_mode_count(n: int) -> int:
    return max(0, min(_LOW_MODES, n - 2))


def _low_laplacian_modes(graph: Graph, k: int) -> tuple[np.ndarray, np.ndarray]:
    """The ``k`` smallest nonzero Laplacian eigenpairs of a connected graph."""
    key = ("low_modes", k)
    if key in graph._cache:
        return graph._cache[key]
    n = graph.num_nodes
    lap = graph.laplacian()
    if n <= _SMALL:
        vals, vecs = np.linalg.eigh(lap.toarray())
    else:
        v0 = make_rng(0, "low-modes").standard_normal(n)
        try:
            vals, vecs = sla.eigsh(lap.tocsc(), k=k + 1, sigma=-1e-3, which="LM", v0=v0, tol=1e-12)
        except sla.ArpackNoConvergence as exc:
            raise NumericalError("low Laplacian eigenpairs did not converge") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    vals, vecs = vals[1 : k + 1].copy(), vecs[:, 1 : k + 1].copy()
    # keep the block exactly orthogonal to the constant vector
    vecs -= vecs.mean(axis=0)
    vecs, _ = np.linalg.qr(vecs)
    graph._cache[key] = (vals, vecs)
    return vals, vecs


_FUNCTIONS = {
    "identity": lambda x: x,
    "inverse": lambda x: 1.0 / x,
    "log": np.log,
    "cube": lambda x: x**3,
}
_NEEDS_POSITIVE = {"inverse", "log"}


_MAX_RESTARTS = 20


def _lanczos_block(matvec, z: np.ndarray, steps: int, project):
    """Independent Lanczos runs, one per column of ``z``, fully reorthogonalised.

    Returns ``(alpha, beta, length)``: tridiagonal coefficients per column
    and how many steps each column ran before an invariant subspace ended it.
    """
    n, k = z.shape
    q = z / np.linalg.norm(z, axis=0)
    basis = [q]
    alpha = np.zeros((steps, k))
    beta = np.zeros((steps, k))
    length = np.full(k, steps)
    live = np.ones(k, dtype=bool)
    prev = np.zeros_like(q)
    b_prev = np.zeros(k)
    for j in range(steps):
        w = project(matvec(q)) - b_prev * prev
        a = np.einsum("ij,ij->j", q, w)
        alpha[j] = np.where(live, a, 0.0)
        w = w - a * q
        for _ in range(2):
            for v in basis:
                w = w - v * np.einsum("ij,ij->j", v, w)
        w = project(w)
        b = np.linalg.norm(w, axis=0)
        scale = np.maximum(np.abs(alpha[: j + 1]).max(axis=0), 1.0)
        ended = live & (b <= 1e-10 * scale)
        length[ended] = j + 1
        live &= ~ended
        if j == steps - 1 or not live.any():
            break
        beta[j] = np.where(live, b, 0.0)
        prev, b_prev = q, beta[j]
        q = np.where(live, w / np.where(b > 0, b, 1.0), 0.0)
        basis.append(q)
    return alpha, beta, length


def _draw_probes(rng: np.random.Generator, n: int, count: int, project) -> np.ndarray:
    """Rademacher probes, one per column, projected onto the estimated subspace.

    A probe whose projection vanishes is kept: it is a legitimate sample whose
    quadratic form is 0, and redrawing it would bias the estimate upward.
    """
    return project(rng.choice(np.array([-1.0, 1.0]), size=(n, count)))


def slq_trace(graph: Graph, matrix: str, f: str, cfg: SlqConfig = SlqConfig(), deflate: bool = True) -> float:
    """Estimate ``tr f(M)`` for the adjacency or Laplacian matrix.

    ``f`` is one of ``identity``, ``inverse``, ``log``, ``cube``. For the
    Laplacian the constant vector is projected out, so the estimate covers
    the nonzero eigenvalues of a connected graph (required by ``inverse``
    and ``log``). For the adjacency matrix with ``deflate=True`` the
    principal eigenpair is computed exactly, its term ``f(mu_max)`` added
    directly and the probes restricted to its orthogonal complement; this
    removes the dominant source of probe variance on dense graphs.
    """
    if f not in _FUNCTIONS:
        raise InputError(f"unknown function {f!r}")
    func = _FUNCTIONS[f]
    n = graph.num_nodes
    if n == 0:
        return 0.0
    exact_part = 0.0
    dim = n
    if matrix == "laplacian":
        if f in _NEEDS_POSITIVE and not is_connected(graph):
            raise DisconnectedGraphError(f"tr {f}(L) is undefined on a disconnected graph")
        matvec = graph.laplacian().__matmul__
        # the constant vector has eigenvalue 0 and every supported f with f(0) defined has f(0) = 0
        dim = n - 1
        k = _low_mode_count(n) if f in _NEEDS_POSITIVE else 0
        if k:
            low_vals, low_vecs = _low_laplacian_modes(graph, k)
            exact_part = float(np.sum(func(low_vals)))
            dim -= k

        def project(x):
            x = x - x.mean(axis=0)
            if k:
                x = x - low_vecs @ (low_vecs.T @ x)
            return x

    elif matrix == "adjacency":
        matvec = graph.adjacency().__matmul__
        if deflate and graph.num_edges > 0:
            top, x = principal_eigenpair(graph)
            exact_part = float(func(np.float64(top)))
            dim = n - 1

            def project(v):
                return v - np.outer(x, x @ v) if v.ndim == 2 else v - x * (x @ v)

        else:

            def project(v):
                return v

    else:
        raise InputError(f"matrix must be 'adjacency' or 'laplacian', got {matrix!r}")
    if dim == 0:
        return exact_part
    rng = make_rng(cfg.seed, "slq", matrix, f)
    z = _draw_probes(rng, n, cfg.num_probes, project)
    norms2 = np.einsum("ij,ij->j", z, z)
    live = np.flatnonzero(norms2 > 1e-12 * n)
    for _attempt in range(_MAX_RESTARTS):
        alpha, beta, length = _lanczos_block(matvec, z[:, live], cfg.lanczos_steps, project)
        bad = ~(np.isfinite(alpha).all(axis=0) & np.isfinite(beta).all(axis=0))
        if not bad.any():
            break
        # breakdown: replace the affected probes with fresh draws
        fresh = _draw_probes(rng, n, int(bad.sum()), project)
        z[:, live[bad]] = fresh
        norms2[live[bad]] = np.einsum("ij,ij->j", fresh, fresh)
    else:
        raise NumericalError("Lanczos broke down on every restart")
    estimates = np.zeros(cfg.num_probes)
    for j, c in enumerate(live):
        k = length[j]
        theta, vecs = eigh_tridiagonal(alpha[:k, j], beta[: k - 1, j])
        if f in _NEEDS_POSITIVE:
            theta = np.maximum(theta, 1e-12)
        tau = vecs[0] ** 2
        estimates[c] = norms2[c] * float(np.sum(tau * func(theta)))
    total = 0.0
    for value in estimates:  # fixed probe order keeps the reduction bit-stable
        total += value
    return float(exact_part + total / cfg.num_probes)


# --- metrics ------------------------------------------------------------------


def _require_connected(graph: Graph, what: str) -> None:
    if graph.num_nodes == 0 or not is_connected(graph):
        raise DisconnectedGraphError(f"{what} is undefined on a disconnected graph")


def _nonzero(lam: np.ndarray) -> np.ndarray:
    # the zero eigenvalue is the first one on a connected graph
    return lam[1:]


def total_effective_resistance(graph: Graph, mode: str = "exact", cfg: SlqConfig = SlqConfig()) -> float:
    """``n * sum(1/lambda_i)`` over the nonzero Laplacian eigenvalues."""
    _require_connected(graph, "effective resistance")
    n = graph.num_nodes
    if n == 1:
        return 0.0
    if mode == "exact":
        return float(n * np.sum(1.0 / _nonzero(dense_spectrum(graph)[0])))
    if mode == "slq":
        return n * slq_trace(graph, "laplacian", "inverse", cfg)
    raise InputError(f"mode must be 'exact' or 'slq', got {mode!r}")


def log_num_spanning_trees(graph: Graph, mode: str = "exact", cfg: SlqConfig = SlqConfig()) -> float:
    """``sum(log lambda_i)`` over nonzero eigenvalues: log of n times the tree count."""
    _require_connected(graph, "spanning-tree count")
    if graph.num_nodes == 1:
        return 0.0
    if mode == "exact":
        return float(np.sum(np.log(_nonzero(dense_spectrum(graph)[0]))))
    if mode == "slq":
        return slq_trace(graph, "laplacian", "log", cfg)
    raise InputError(f"mode must be 'exact' or 'slq', got {mode!r}")


def triangle_count(graph: Graph, mode: str = "exact", cfg: SlqConfig = SlqConfig()) -> float:
    """``tr(A^3) / 6``; exact mode counts wedge closures."""
    if mode == "exact":
        return float(exact_triangle_count(graph))
    if mode == "slq":
        return slq_trace(graph, "adjacency", "cube", cfg) / 6.0
    raise InputError(f"mode must be 'exact' or 'slq', got {mode!r}")


def global_clustering_coefficient(graph: Graph) -> float:
    """``3 * triangles / wedges``; 0 when the graph has no wedge."""
    wedges = wedge_count(graph)
    if wedges == 0:
        return 0.0
    return 3.0 * exact_triangle_count(graph) / wedges


def local_clustering(graph: Graph) -> np.ndarray:
    """Per-node clustering ``c_i``; nodes of degree < 2 get 0."""
    n = graph.num_nodes
    tri = np.zeros(n)
    per_edge = edge_triangle_counts(graph)
    np.add.at(tri, graph.edges[:, 0], per_edge)
    np.add.at(tri, graph.edges[:, 1], per_edge)
    tri /= 2.0
    d = graph.degrees.astype(float)
    pairs = d * (d - 1) / 2.0
    return np.divide(tri, pairs, out=np.zeros(n), where=pairs > 0)


def avg_local_clustering(graph: Graph) -> float:
    if graph.num_nodes == 0:
        return 0.0
    return float(local_clustering(graph).mean())


def pair_effective_resistance(graph: Graph, u: int, v: int, tol: float = 1e-8) -> float:
    """``(e_u - e_v)^T L^+ (e_u - e_v)`` by a Jacobi-preconditioned CG solve."""
    graph._check_node(u)
    graph._check_node(v)
    if u == v:
        return 0.0
    _, labels = components(graph)
    if labels[u] != labels[v]:
        raise DisconnectedGraphError(f"nodes {u} and {v} lie in different components")
    n = graph.num_nodes
    lap = graph.laplacian()
    b = np.zeros(n)
    b[u], b[v] = 1.0, -1.0
    precond = sp.diags(1.0 / np.maximum(graph.degrees, 1).astype(float))
    x, info = sla.cg(lap, b, rtol=tol * 1e-2, atol=0.0, maxiter=20 * n + 100, M=precond)
    residual = np.linalg.norm(lap @ x - b)
    if residual > tol:
        raise NumericalError(f"Laplacian solve stalled at residual {residual:.3g} (info={info})")
    return float(x[u] - x[v])


def edge_effective_resistances(graph: Graph) -> np.ndarray:
    """Effective resistance of every edge, by edge id."""
    _require_connected(graph, "effective resistance")
    if graph.num_nodes <= DENSE_CAP:
        pinv = _laplacian_pinv(graph)
        u, v = graph.edges[:, 0], graph.edges[:, 1]
        return pinv[u, u] + pinv[v, v] - 2.0 * pinv[u, v]
    return np.array([pair_effective_resistance(graph, int(u), int(v)) for u, v in graph.edges])


@dataclass
class MetricsReport:
    """The eight structural metrics of one graph plus diagnostic flags."""

    algebraic_connectivity: float
    spectral_radius: float
    effective_resistance: float
    log_num_trees: float
    num_triangles: float
    global_cc: float
    avg_local_cc: float
    finite_condition_number: float
    flags: tuple[str, ...] = field(default=())
    fiedler_residual: float = 0.0

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)][:8]

    def values(self) -> list[float]:
        return [getattr(self, name) for name in self.names()]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names(), self.values()))

    def tsv_header(self) -> str:
        return "\t".join(self.names())

    def tsv_row(self) -> str:
        return "\t".join(format_value(v) for v in self.values())


def format_value(x: float) -> str:
    """Shortest round-trip float text; ``nan``/``inf`` spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def resolve_mode(graph: Graph, mode: str) -> str:
    if mode == "auto":
        return "exact" if graph.num_nodes <= DENSE_CAP else "slq"
    if mode not in ("exact", "slq"):
        raise InputError(f"mode must be 'exact', 'slq' or 'auto', got {mode!r}")
    return mode


def compute_metrics(graph: Graph, mode: str = "auto", cfg: SlqConfig = SlqConfig()) -> MetricsReport:
    """All eight metrics. Spectral ones become ``nan`` on disconnected input."""
    mode = resolve_mode(graph, mode)
    flags = []
    connected = graph.num_nodes > 0 and is_connected(graph)
    if not connected:
        flags.append("disconnected")
    if wedge_count(graph) == 0:
        flags.append("no_wedges")
    nan = float("nan")
    radius = spectral_radius(graph) if graph.num_edges else 0.0
    if connected and graph.num_nodes > 1:
        fied = fiedler(graph)
        lam_max = float(dense_spectrum(graph)[0][-1]) if mode == "exact" else laplacian_max(graph)
        lam2, kappa = fied.value, lam_max / fied.value
        resistance = total_effective_resistance(graph, mode, cfg)
        log_trees = log_num_spanning_trees(graph, mode, cfg)
        residual = fied.residual
    elif connected:
        lam2, kappa, resistance, log_trees, residual = 0.0, nan, 0.0, 0.0, 0.0
    else:
        lam2, kappa, resistance, log_trees, residual = 0.0, nan, nan, nan, 0.0
    return MetricsReport(
        algebraic_connectivity=lam2,
        spectral_radius=radius,
        effective_resistance=resistance,
        log_num_trees=log_trees,
        num_triangles=triangle_count(graph, mode, cfg),
        global_cc=global_clustering_coefficient(graph),
        avg_local_cc=avg_local_clustering(graph),
        finite_condition_number=kappa,
        flags=tuple(flags),
        fiedler_residual=residual,
    )

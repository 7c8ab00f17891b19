import itertools
import math

import numpy as np
import pytest

from glt.errors import DisconnectedGraphError, SizeError
from glt.generators import SbmSpec, generate_sbm, named_graph
from glt.graph import edge_triangle_count, exact_triangle_count, from_edges
from glt.spectral import (
    MetricsReport,
    SlqConfig,
    algebraic_connectivity,
    avg_local_clustering,
    compute_metrics,
    dense_spectrum,
    edge_effective_resistances,
    fiedler,
    global_clustering_coefficient,
    local_clustering,
    log_num_spanning_trees,
    pair_effective_resistance,
    slq_trace,
    spectral_radius,
    total_effective_resistance,
    triangle_count,
)

from conftest import bfs_diameter, corpus, dense_pinv_resistance, k4_minus_edge, two_triangles

K3, K4, P3 = named_graph("complete", 3), named_graph("complete", 4), named_graph("path", 3)


def test_dense_spectrum_examples():
    lam, mu = dense_spectrum(K3)
    assert np.allclose(lam, [0, 3, 3]) and np.allclose(mu, [-1, -1, 2])
    assert np.allclose(dense_spectrum(P3)[0], [0, 1, 3])
    assert np.allclose(dense_spectrum(from_edges(2, []))[0], [0, 0])
    with pytest.raises(SizeError):
        dense_spectrum(named_graph("path", 30), cap=10)


@pytest.mark.parametrize("g,expected", [(K4, 3.0), (named_graph("complete", 7), 6.0), (named_graph("ring", 6), 2.0), (named_graph("path", 2), 1.0)])
def test_spectral_radius_examples(g, expected):
    assert spectral_radius(g) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("name", ["karate", "sbm300", "barbell10", "ring40"])
def test_spectral_radius_matches_dense(name):
    g = corpus()[name]
    assert spectral_radius(g) == pytest.approx(dense_spectrum(g)[1][-1], rel=1e-8)


def test_spectral_radius_iterative_path():
    g, _ = generate_sbm(SbmSpec(400, k=4, snr=4, avg_degree=15, seed=2))
    assert spectral_radius(g) == pytest.approx(dense_spectrum(g)[1][-1], rel=1e-8)


@pytest.mark.parametrize("g,expected", [(K3, 3.0), (named_graph("complete", 9), 9.0), (P3, 1.0), (named_graph("ring", 4), 2.0)])
def test_algebraic_connectivity_examples(g, expected):
    assert algebraic_connectivity(g) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("n", [100, 400])
def test_algebraic_connectivity_iterative_matches_dense(n):
    for g in [named_graph("path", n), generate_sbm(SbmSpec(n, k=4, snr=5, avg_degree=12, seed=1))[0]]:
        result = fiedler(g)
        assert result.value == pytest.approx(dense_spectrum(g)[0][1], rel=1e-6)
        assert result.residual < 1e-6


def test_algebraic_connectivity_disconnected():
    result = fiedler(two_triangles())
    assert result.value == 0 and not result.connected


def test_total_resistance_examples():
    assert total_effective_resistance(K3) == pytest.approx(2.0, abs=1e-12)
    assert total_effective_resistance(P3) == pytest.approx(4.0, abs=1e-12)
    assert total_effective_resistance(K4) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(DisconnectedGraphError):
        total_effective_resistance(two_triangles())


def test_pair_resistance_examples():
    assert pair_effective_resistance(named_graph("path", 5), 1, 2) == pytest.approx(1.0, abs=1e-9)
    assert pair_effective_resistance(K3, 0, 1) == pytest.approx(2 / 3, abs=1e-9)
    assert pair_effective_resistance(P3, 0, 2) == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(DisconnectedGraphError):
        pair_effective_resistance(two_triangles(), 0, 4)
    # same component of a disconnected graph is fine
    assert pair_effective_resistance(two_triangles(), 0, 1) == pytest.approx(2 / 3, abs=1e-9)


@pytest.mark.parametrize("name", ["k4-e", "wheel6", "karate", "path30", "star20", "barbell10"])
def test_total_resistance_is_sum_over_all_pairs(name):
    g = corpus()[name]
    pairs = sum(pair_effective_resistance(g, u, v) for u, v in itertools.combinations(range(g.num_nodes), 2))
    assert pairs == pytest.approx(total_effective_resistance(g), rel=1e-8)


@pytest.mark.parametrize("name", ["karate", "sbm120", "barbell10"])
def test_edge_resistances_match_pinv_oracle(name):
    g = corpus()[name]
    dense = edge_effective_resistances(g)
    for e in range(0, g.num_edges, max(1, g.num_edges // 15)):
        u, v = g.edges[e]
        oracle = dense_pinv_resistance(g, u, v)
        assert dense[e] == pytest.approx(oracle, abs=1e-9)
        assert pair_effective_resistance(g, int(u), int(v)) == pytest.approx(oracle, abs=1e-8)


def test_log_trees_examples():
    assert math.exp(log_num_spanning_trees(P3)) / 3 == pytest.approx(1.0)
    assert log_num_spanning_trees(P3) == pytest.approx(math.log(3))
    assert log_num_spanning_trees(K3) == pytest.approx(math.log(9))
    assert log_num_spanning_trees(K4) == pytest.approx(math.log(64))
    tree = named_graph("star", 12)
    assert log_num_spanning_trees(tree) == pytest.approx(math.log(12))


def test_triangle_examples():
    assert triangle_count(K3) == 1
    assert triangle_count(named_graph("star", 7)) == 0
    assert triangle_count(K4) == 4


@pytest.mark.parametrize("name", sorted(corpus()))
def test_exact_triangle_count_agrees_with_graph_core(name):
    g = corpus()[name]
    assert triangle_count(g, "exact") == exact_triangle_count(g)


def test_global_cc_examples():
    assert global_clustering_coefficient(K3) == 1
    assert global_clustering_coefficient(named_graph("star", 6)) == 0
    # K4 minus an edge: 2 triangles, wedges 3+3+1+1 = 8 by enumeration
    g = k4_minus_edge()
    wedges = sum(1 for c in range(4) for a, b in itertools.combinations(g.neighbors(c).tolist(), 2))
    assert wedges == 8
    assert global_clustering_coefficient(g) == pytest.approx(3 * 2 / wedges)
    a = g.adjacency().toarray()
    a2 = a @ a
    assert global_clustering_coefficient(g) == pytest.approx(np.trace(a2 @ a) / (a2.sum() - np.trace(a2)))


def brute_local_cc(g):
    out = []
    for i in range(g.num_nodes):
        nb = g.neighbors(i).tolist()
        d = len(nb)
        if d < 2:
            out.append(0.0)
            continue
        closed = sum(1 for j in nb for k in nb if j != k and g.has_edge(j, k))
        out.append(closed / (d * (d - 1)))
    return np.array(out)


@pytest.mark.parametrize("name", ["k4-e", "karate", "wheel6", "sbm120", "star5"])
def test_local_cc_brute_force(name):
    g = corpus()[name]
    assert np.allclose(local_clustering(g), brute_local_cc(g))


def test_avg_local_cc_examples():
    assert avg_local_clustering(K3) == 1
    assert avg_local_clustering(named_graph("path", 8)) == 0
    assert avg_local_clustering(k4_minus_edge()) == pytest.approx(np.mean(brute_local_cc(k4_minus_edge())))
    assert avg_local_clustering(k4_minus_edge()) == pytest.approx(5 / 6)


def test_slq_identity_is_trace_in_expectation():
    values = [slq_trace(K3, "laplacian", "identity", SlqConfig(seed=s)) for s in range(200)]
    assert np.mean(values) == pytest.approx(6.0, rel=0.02)
    # each probe's quadratic form on the identity is exact, so only probe noise remains
    assert all(v >= 0 for v in values)


def test_slq_examples():
    assert slq_trace(K4, "adjacency", "cube") == pytest.approx(24.0, rel=0.10)
    assert slq_trace(K3, "laplacian", "log") == pytest.approx(math.log(9), rel=0.10)
    # identity on the adjacency trace is 0 in expectation; undeflated probes are exact for K4
    assert slq_trace(K4, "adjacency", "cube", deflate=False) == pytest.approx(24.0, rel=0.5)


def test_slq_trace_identity_unbiased_on_larger_graph():
    g = corpus()["karate"]
    est = slq_trace(g, "laplacian", "identity", SlqConfig(num_probes=400))
    assert est == pytest.approx(2 * g.num_edges, rel=0.05)


def test_slq_deterministic_per_seed():
    g = corpus()["sbm120"]
    cfg = SlqConfig(seed=7)
    assert slq_trace(g, "laplacian", "log", cfg) == slq_trace(g, "laplacian", "log", cfg)
    assert slq_trace(g, "laplacian", "log", cfg) != slq_trace(g, "laplacian", "log", SlqConfig(seed=8))


def slq_relative_error(estimate, target):
    # zero targets (triangle-free graphs) are scored against one unit
    return abs(estimate - target) / max(abs(target), 1.0)


@pytest.mark.parametrize("name", sorted(corpus()))
def test_slq_metrics_within_five_percent(name):
    """Mean over 10 SLQ seeds against the dense oracle, default probes and steps."""
    g = corpus()[name]
    exact = compute_metrics(g, "exact")
    estimates = [compute_metrics(g, "slq", SlqConfig(seed=s)) for s in range(10)]
    errors = {
        field: slq_relative_error(np.mean([getattr(r, field) for r in estimates]), getattr(exact, field))
        for field in MetricsReport.names()
    }
    over = {field: round(float(err), 4) for field, err in errors.items() if err > 0.05}
    assert not over, over


@pytest.mark.parametrize("name", sorted(corpus()))
def test_fiedler_diameter_bound(name):
    g = corpus()[name]
    lam2 = algebraic_connectivity(g)
    assert lam2 > 0
    assert lam2 >= 4 / (g.num_nodes * bfs_diameter(g)) - 1e-12


def cut_enumeration(g):
    """Minimum edge expansion and conductance over all cuts, exhaustively."""
    n = g.num_nodes
    deg = g.degrees
    vol = deg.sum()
    edges = g.edges
    best_h = best_phi = math.inf
    for mask in range(1, 2 ** (n - 1)):
        side = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        cut = np.sum(side[edges[:, 0]] != side[edges[:, 1]])
        size = min(side.sum(), n - side.sum())
        vol_s = deg[side].sum()
        best_h = min(best_h, cut / size)
        best_phi = min(best_phi, cut / min(vol_s, vol - vol_s))
    return best_h, best_phi


@pytest.mark.parametrize("name", [k for k, g in corpus().items() if g.num_nodes <= 14])
def test_cheeger_sandwich(name):
    g = corpus()[name]
    h, phi = cut_enumeration(g)
    lam2 = algebraic_connectivity(g)
    # combinatorial Laplacian with edge expansion: upper bound carries d_max
    assert lam2 / 2 <= h + 1e-12
    assert h <= math.sqrt(2 * g.degrees.max() * lam2) + 1e-12
    # normalized Laplacian with conductance: the two-sided bound without d_max
    d = g.degrees.astype(float)
    norm_lap = np.eye(g.num_nodes) - g.adjacency().toarray() / np.sqrt(np.outer(d, d))
    nu2 = np.linalg.eigvalsh(norm_lap)[1]
    assert nu2 / 2 <= phi + 1e-12
    assert phi <= math.sqrt(2 * nu2) + 1e-12


@pytest.mark.parametrize("name", sorted(corpus()))
def test_edge_resistance_triangle_bound(name):
    g = corpus()[name]
    omega = edge_effective_resistances(g)
    for e, (u, v) in enumerate(g.edges.tolist()):
        assert omega[e] <= 2 / (edge_triangle_count(g, u, v) + 2) + 1e-9


@pytest.mark.parametrize("name", sorted(corpus()))
def test_metrics_report_invariants(name):
    g = corpus()[name]
    r = compute_metrics(g, "exact")
    assert all(math.isfinite(v) for v in r.values())
    assert r.algebraic_connectivity > 0
    assert r.finite_condition_number >= 1 - 1e-12
    assert 0 <= r.global_cc <= 1 and 0 <= r.avg_local_cc <= 1


def test_metrics_report_disconnected_flags():
    r = compute_metrics(two_triangles(), "exact")
    assert "disconnected" in r.flags
    assert r.algebraic_connectivity == 0
    assert math.isnan(r.effective_resistance)
    r = compute_metrics(named_graph("path", 2), "exact")
    assert "no_wedges" in r.flags and r.global_cc == 0


def test_metrics_tsv_row():
    r = compute_metrics(K4, "exact")
    assert r.tsv_header().split("\t") == MetricsReport.names()
    assert len(r.tsv_row().split("\t")) == 8
    assert MetricsReport.names() == [
        "algebraic_connectivity",
        "spectral_radius",
        "effective_resistance",
        "log_num_trees",
        "num_triangles",
        "global_cc",
        "avg_local_cc",
        "finite_condition_number",
    ]

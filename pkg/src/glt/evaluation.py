"""Louvain clustering, NMI scoring and the degree-sweep experiment driver."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from sklearn.metrics import normalized_mutual_info_score

from .errors import GltError, InputError, NumericalError
from .graph import Graph, is_connected, largest_component
from .rng import ensure_rng, make_rng
from .sparsify import METHODS, canonical_method, sparsify, target_edges
from .spectral import MetricsReport, SlqConfig, compute_metrics, format_value

__all__ = [
    "Partition",
    "modularity",
    "louvain",
    "louvain_levels",
    "nmi",
    "train_test_split",
    "DEFAULT_DEGREES",
    "SweepRow",
    "SweepResult",
    "degree_sweep",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    assignment: np.ndarray

    @property
    def num_clusters(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> Partition:
        _, inverse = np.unique(np.asarray(labels), return_inverse=True)
        return cls(inverse.astype(np.int64))

    def clusters(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == c) for c in range(self.num_clusters)]


def modularity(graph: Graph, partition: Partition | Sequence[int]) -> float:
    """``sum_c e_c / m - (d_c / 2m)^2`` at resolution 1."""
    labels = partition.assignment if isinstance(partition, Partition) else np.asarray(partition)
    if len(labels) != graph.num_nodes:
        raise InputError("partition length differs from node count")
    m = graph.num_edges
    if m == 0:
        raise InputError("modularity needs at least one edge")
    _, labels = np.unique(labels, return_inverse=True)
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    same = labels[u] == labels[v]
    k = labels.max() + 1
    intra = np.bincount(labels[u][same], minlength=k)
    tot = np.bincount(labels, weights=graph.degrees, minlength=k)
    return float(np.sum(intra / m - (tot / (2.0 * m)) ** 2))


class _Level:
    """Weighted multigraph used by one Louvain level."""

    def __init__(self, n: int, adj: list[dict[int, float]], loops: list[float]):
        self.n = n
        self.adj = adj
        self.loops = loops
        self.strength = [sum(a.values()) + 2.0 * loops[i] for i, a in enumerate(adj)]

    @classmethod
    def from_graph(cls, graph: Graph) -> _Level:
        adj = [dict.fromkeys(graph.neighbors(i).tolist(), 1.0) for i in range(graph.num_nodes)]
        return cls(graph.num_nodes, adj, [0.0] * graph.num_nodes)

    def aggregate(self, comm: list[int], k: int) -> _Level:
        adj = [dict() for _ in range(k)]
        loops = [0.0] * k
        for i in range(self.n):
            ci = comm[i]
            loops[ci] += self.loops[i]
            for j, w in self.adj[i].items():
                cj = comm[j]
                if ci == cj:
                    loops[ci] += w / 2.0  # each intra edge is seen from both ends
                else:
                    adj[ci][cj] = adj[ci].get(cj, 0.0) + w
        return _Level(k, adj, loops)


def _local_moves(level: _Level, rng: np.random.Generator, m2: float) -> tuple[list[int], bool]:
    comm = list(range(level.n))
    tot = list(level.strength)
    moved_any = False
    order = rng.permutation(level.n).tolist()
    while True:
        moved = 0
        for i in order:
            ci, ki = comm[i], level.strength[i]
            links: dict[int, float] = {}
            for j, w in level.adj[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            best, best_gain = ci, links.get(ci, 0.0) - tot[ci] * ki / m2
            for c, w in links.items():
                gain = w - tot[c] * ki / m2
                if gain > best_gain + 1e-12:
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                comm[i] = best
                moved += 1
        if not moved:
            break
        moved_any = True
    _, relabel = np.unique(comm, return_inverse=True)
    return relabel.tolist(), moved_any


def louvain_levels(graph: Graph, rng=None) -> Iterator[Partition]:
    """Yield the partition of the original nodes after each Louvain level."""
    if graph.num_edges == 0:
        raise InputError("Louvain needs at least one edge")
    rng = ensure_rng(rng)
    m2 = 2.0 * graph.num_edges
    level = _Level.from_graph(graph)
    membership = np.arange(graph.num_nodes)
    while True:
        comm, moved = _local_moves(level, rng, m2)
        if not moved:
            return
        k = max(comm) + 1
        membership = np.asarray(comm)[membership]
        yield Partition(membership.copy())
        if k == level.n:
            return
        level = level.aggregate(comm, k)


def louvain(graph: Graph, rng=None) -> Partition:
    """Greedy modularity maximisation with node visits shuffled by ``rng``."""
    best = Partition(np.arange(graph.num_nodes))
    q = modularity(graph, best)
    for part in louvain_levels(graph, rng):
        q_next = modularity(graph, part)
        assert q_next >= q - 1e-9, "Louvain level decreased modularity"
        best, q = part, q_next
    return best


def nmi(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Mutual information over the geometric mean of the entropies."""
    a, b = np.asarray(labels_a), np.asarray(labels_b)
    if a.shape != b.shape:
        raise InputError(f"label vectors differ in length: {len(a)} vs {len(b)}")
    return float(normalized_mutual_info_score(a, b, average_method="geometric"))


def train_test_split(labels: Sequence[int], per_class: int = 20, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """``per_class`` random training nodes from each class; the rest is test."""
    rng = ensure_rng(rng)
    labels = np.asarray(labels)
    train = []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        if len(members) < per_class:
            raise InputError(f"class {c} has {len(members)} nodes, fewer than {per_class}")
        train.append(rng.choice(members, size=per_class, replace=False))
    train = np.sort(np.concatenate(train)) if train else np.zeros(0, dtype=np.int64)
    test = np.setdiff1d(np.arange(len(labels)), train)
    return train, test


# --- degree sweep ---------------------------------------------------------------

DEFAULT_DEGREES = (1.1, 1.5, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0)
FULL = "full"
_METHOD_RANK = {name: i for i, name in enumerate((FULL,) + METHODS)}
TSV_HEADER = "method\tdegree\tseed\tmetric\tvalue"


@dataclass(frozen=True)
class SweepRow:
    method: str
    degree: float
    seed: int
    metric: str
    value: float

    def sort_key(self):
        metric_rank = MetricsReport.names().index(self.metric) if self.metric in MetricsReport.names() else 99
        return (_METHOD_RANK.get(self.method, 99), self.method, self.degree, self.seed, metric_rank, self.metric)

    def tsv(self) -> str:
        return "\t".join([self.method, format_value(self.degree), str(self.seed), self.metric, format_value(self.value)])


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    failures: int = 0

    def to_tsv(self) -> str:
        lines = [f"# {note}" for note in self.notes]
        lines.append(TSV_HEADER)
        lines.extend(row.tsv() for row in sorted(self.rows, key=SweepRow.sort_key))
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_tsv())

    def select(self, method: str | None = None, metric: str | None = None, degree: float | None = None) -> list[SweepRow]:
        return [
            r
            for r in self.rows
            if (method is None or r.method == method)
            and (metric is None or r.metric == metric)
            and (degree is None or math.isclose(r.degree, degree))
        ]

    def values(self, method: str, metric: str, degree: float | None = None) -> np.ndarray:
        return np.array([r.value for r in self.select(method, metric, degree)])


@dataclass(frozen=True)
class _Cell:
    method: str
    degree: float
    seed: int


@dataclass
class _Context:
    graph: Graph
    labels: np.ndarray | None
    what: str
    mode: str
    slq: SlqConfig
    base_seed: int


def _metric_rows(method, degree, seed, report: MetricsReport) -> list[SweepRow]:
    return [SweepRow(method, degree, seed, name, float(v)) for name, v in report.as_dict().items()]


def _degree_key(degree: float) -> int:
    return int(round(degree * 1_000_000))


def _run_cell(ctx: _Context, cell: _Cell) -> tuple[list[SweepRow], list[str], int]:
    graph = ctx.graph
    if cell.method == FULL:
        sub = graph
    else:
        target = target_edges(graph.num_nodes, cell.degree)
        rng = make_rng(ctx.base_seed, cell.method, _degree_key(cell.degree), cell.seed)
        try:
            sub = sparsify(graph, cell.method, target, rng)
        except GltError as exc:
            note = f"skipped {cell.method} d={format_value(cell.degree)} seed={cell.seed}: {exc}"
            return _nan_rows(ctx, cell), [note], 0
    try:
        if ctx.what == "metrics":
            cfg = replace(ctx.slq, seed=ctx.slq.seed + cell.seed)
            return _metric_rows(cell.method, cell.degree, cell.seed, compute_metrics(sub, ctx.mode, cfg)), [], 0
        if not is_connected(sub):
            note = f"omitted nmi for {cell.method} d={format_value(cell.degree)} seed={cell.seed}: disconnected output"
            return [], [note], 0
        rng = make_rng(ctx.base_seed, "louvain", cell.method, _degree_key(cell.degree), cell.seed)
        score = nmi(louvain(sub, rng).assignment, ctx.labels)
        return [SweepRow(cell.method, cell.degree, cell.seed, "nmi", score)], [], 0
    except NumericalError as exc:
        note = f"failed {cell.method} d={format_value(cell.degree)} seed={cell.seed}: {exc}"
        return _nan_rows(ctx, cell), [note], 1


def _nan_rows(ctx: _Context, cell: _Cell) -> list[SweepRow]:
    names = MetricsReport.names() if ctx.what == "metrics" else ["nmi"]
    return [SweepRow(cell.method, cell.degree, cell.seed, name, float("nan")) for name in names]


def _run_chunk(args):
    ctx, cells = args
    return [_run_cell(ctx, cell) for cell in cells]


def degree_sweep(
    graph: Graph,
    methods: Sequence[str] = ("ktree", "one_tree", "spectral_radius", "edge_significance"),
    degrees: Sequence[float] = DEFAULT_DEGREES,
    seeds: int = 5,
    what: str = "metrics",
    labels: Sequence[int] | None = None,
    mode: str = "auto",
    slq: SlqConfig = SlqConfig(),
    base_seed: int = 42,
    jobs: int = 1,
) -> SweepResult:
    """Sparsify ``graph`` over a grid of target average degrees and score each output.

    Each ``(method, degree, seed)`` cell sparsifies to ``round(d * n / 2)``
    edges and records either the eight structural metrics or the Louvain
    NMI against ``labels``. Full-graph reference rows use method ``full``
    at the graph's natural average degree. Cells draw from independent
    streams keyed by the cell, so results do not depend on ``jobs``.
    """
    if what not in ("metrics", "clustering"):
        raise InputError(f"what must be 'metrics' or 'clustering', got {what!r}")
    if seeds < 1:
        raise InputError("seeds must be >= 1")
    methods = [canonical_method(m) for m in methods]
    result = SweepResult()
    label_arr = None
    if what == "clustering":
        if labels is None:
            raise InputError("clustering sweeps need labels")
        label_arr = np.asarray(labels)
        if len(label_arr) != graph.num_nodes:
            raise InputError(f"{len(label_arr)} labels for {graph.num_nodes} nodes")
    if graph.num_nodes > 0 and not is_connected(graph):
        graph, nodes = largest_component(graph)
        if label_arr is not None:
            label_arr = label_arr[nodes]
        result.notes.append(f"input disconnected; using largest component with {graph.num_nodes} nodes")
    natural = 2.0 * graph.num_edges / graph.num_nodes if graph.num_nodes else 0.0
    grid = []
    for d in degrees:
        if d > natural + 1e-12:
            result.notes.append(f"degree {format_value(d)} clipped to natural average degree {format_value(natural)}")
            d = natural
        if not any(math.isclose(d, g) for g in grid):
            grid.append(float(d))
    grid.sort()

    ctx = _Context(graph, label_arr, what, mode, slq, base_seed)
    cells = [_Cell(FULL, natural, 0)] if what == "metrics" else [_Cell(FULL, natural, s) for s in range(seeds)]
    cells += [_Cell(m, d, s) for m in methods for d in grid for s in range(seeds)]
    if jobs > 1 and len(cells) > 1:
        chunks = [cells[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = [out for chunk in pool.map(_run_chunk, [(ctx, c) for c in chunks]) for out in chunk]
    else:
        outputs = [_run_cell(ctx, cell) for cell in cells]
    notes = []
    for rows, cell_notes, failed in outputs:
        result.rows.extend(rows)
        notes.extend(cell_notes)
        result.failures += failed
    result.notes.extend(sorted(notes))
    log.info("sweep finished: %d rows, %d notes", len(result.rows), len(result.notes))
    return result

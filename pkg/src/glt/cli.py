"""Command-line interface: ``glt sparsify|metrics|gen-sbm|sweep|export-dot``.

Exit codes: 0 success, 2 bad input, 3 infeasible edge budget, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .curvature import curvature_report, forman_all, write_curvature_tsv
from .errors import DisconnectedGraphError, GltError, InfeasibleBudgetError, InputError, NumericalError
from .evaluation import DEFAULT_DEGREES, degree_sweep
from .generators import SbmSpec, generate_sbm, parse_named
from .graph import Graph, is_connected, load_edge_list, load_labels, save_edge_list, save_labels
from .rng import MAX_SEED, make_rng
from .sparsify import METHODS, canonical_method, sparsify, target_edges
from .spectral import SlqConfig, compute_metrics, format_value

log = logging.getLogger("glt")

EXIT_INPUT, EXIT_BUDGET, EXIT_NUMERIC = 2, 3, 4
BUILTIN = "builtin:"


def read_graph(spec: str) -> Graph:
    """Load an edge-list file, or a named graph given as ``builtin:karate``."""
    if spec.startswith(BUILTIN):
        return parse_named(spec[len(BUILTIN):])
    if not Path(spec).is_file():
        raise InputError(f"no such file: {spec}")
    return load_edge_list(spec)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _csv(cast):
    def parse(text: str):
        try:
            return [cast(part) for part in text.split(",") if part.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def cmd_sparsify(args) -> int:
    graph = read_graph(args.input)
    method = canonical_method(args.method)
    target = args.edges if args.edges is not None else target_edges(graph.num_nodes, args.avg_degree)
    out = sparsify(graph, method, target, make_rng(args.seed, "sparsify", method))
    save_edge_list(out, args.output)
    print(f"method={method} edges={out.num_edges} connected={str(is_connected(out)).lower()}")
    return 0


def cmd_metrics(args) -> int:
    graph = read_graph(args.input)
    cfg = SlqConfig(num_probes=args.probes, lanczos_steps=args.steps, seed=args.seed)
    report = compute_metrics(graph, args.mode, cfg)
    lines = [f"# flag: {flag}" for flag in report.flags]
    lines.append("metric\tvalue")
    lines.extend(f"{name}\t{format_value(value)}" for name, value in report.as_dict().items())
    forman_mean = rho_mean = float("nan")
    if graph.num_edges:
        try:
            curv = curvature_report(graph, args.gamma)
            forman_mean, rho_mean = curv.mean_forman, curv.mean_resistance_curvature
            if args.curvature_output:
                write_curvature_tsv(curv, args.curvature_output)
        except DisconnectedGraphError:
            forman_mean = float(forman_all(graph, args.gamma).mean())
    lines.append(f"mean_forman\t{format_value(forman_mean)}")
    lines.append(f"mean_resistance_curvature\t{format_value(rho_mean)}")
    Path(args.output).write_text("\n".join(lines) + "\n")
    return 0


def cmd_gen_sbm(args) -> int:
    spec = SbmSpec(n=args.n, k=args.k, snr=args.snr, avg_degree=args.avg_degree, seed=args.seed)
    graph, labels = generate_sbm(spec)
    save_edge_list(graph, f"{args.output}.edges")
    save_labels(labels, f"{args.output}.labels")
    print(f"nodes={graph.num_nodes} edges={graph.num_edges} mean_degree={2 * graph.num_edges / max(graph.num_nodes, 1):.4f}")
    return 0


def cmd_sweep(args) -> int:
    graph = read_graph(args.input)
    labels = None
    if args.what == "clustering":
        if not args.labels:
            raise InputError("--labels is required with --what clustering")
        labels = load_labels(args.labels)
    result = degree_sweep(
        graph,
        methods=args.methods,
        degrees=args.degrees,
        seeds=args.seeds,
        what=args.what,
        labels=labels,
        mode=args.mode,
        slq=SlqConfig(num_probes=args.probes, lanczos_steps=args.steps),
        base_seed=args.seed,
        jobs=args.jobs,
    )
    result.write(args.output)
    return EXIT_NUMERIC if result.failures else 0


def cmd_export_dot(args) -> int:
    graph = read_graph(args.input)
    bold = set()
    if args.highlight:
        backbone = load_edge_list(args.highlight)
        for u, v in backbone.edges.tolist():
            if u >= graph.num_nodes or not graph.has_edge(u, v):
                raise InputError(f"highlighted edge ({u}, {v}) is not in the graph")
            bold.add((u, v))
    lines = ["graph G {"]
    lines.extend(f"  {i};" for i in range(graph.num_nodes))
    for u, v in graph.edges.tolist():
        style = " [style=bold, penwidth=3]" if (u, v) in bold else ""
        lines.append(f"  {u} -- {v}{style};")
    lines.append("}")
    Path(args.output).write_text("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glt", description="Sparse spanning-tree backbones of graphs.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sparsify", help="sparsify a graph to an edge budget")
    p.add_argument("--input", required=True, help="edge-list file or builtin:<name>")
    p.add_argument("--method", required=True, help=f"one of {', '.join(METHODS)} (1tree accepted)")
    budget = p.add_mutually_exclusive_group(required=True)
    budget.add_argument("--avg-degree", type=float, help="target average degree d, budget round(d*n/2)")
    budget.add_argument("--edges", type=int, help="target number of edges")
    p.add_argument("--seed", type=_seed, default=42)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("metrics", help="structural metrics of a graph")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=["exact", "slq", "auto"], default="auto")
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--seed", type=_seed, default=42)
    p.add_argument("--gamma", type=float, default=1.0, help="Forman triangle weight")
    p.add_argument("--curvature-output", help="optional per-edge/per-node curvature table")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("gen-sbm", help="sample a stochastic block model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--snr", type=float, default=5.0)
    p.add_argument("--avg-degree", type=float, default=100.0)
    p.add_argument("--seed", type=_seed, default=42)
    p.add_argument("--output", required=True, help="prefix for .edges and .labels")
    p.set_defaults(func=cmd_gen_sbm)

    p = sub.add_parser("sweep", help="metrics or clustering over a degree grid")
    p.add_argument("--input", required=True)
    p.add_argument("--labels")
    p.add_argument("--methods", type=_csv(str), default=["ktree", "one_tree", "spectral_radius", "edge_significance"])
    p.add_argument("--degrees", type=_csv(float), default=list(DEFAULT_DEGREES))
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--what", choices=["metrics", "clustering"], default="metrics")
    p.add_argument("--mode", choices=["exact", "slq", "auto"], default="auto")
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--seed", type=_seed, default=42)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-dot", help="Graphviz DOT with an optional bold backbone")
    p.add_argument("--input", required=True)
    p.add_argument("--highlight")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InfeasibleBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GltError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

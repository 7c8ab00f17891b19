"""Sparse connected backbones of graphs from unions of uniform spanning trees."""

__version__ = "0.1.0"

from .errors import (
    DisconnectedGraphError,
    GltError,
    InfeasibleBudgetError,
    InputError,
    NumericalError,
    ParseError,
    SizeError,
)
from .generators import SbmSpec, generate_sbm, named_graph
from .graph import Graph, from_edges, is_connected, largest_component, load_edge_list, save_edge_list
from .rng import make_rng
from .sparsify import ktree, one_tree, random_baseline, sparsify, target_edges
from .spectral import MetricsReport, SlqConfig, compute_metrics
from .trees import sample_spanning_tree

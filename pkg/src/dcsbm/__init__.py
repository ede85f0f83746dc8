"""Community detection under standard and degree-corrected block models."""

from .criteria import Criterion, evaluate, evaluate_delta
from .graph import (BlockStats, Graph, GraphFormatError, StatsDelta, apply_switch,
                    block_stats, largest_connected_component, load_edge_list,
                    load_gml_subset)
from .metrics import adjusted_rand, nmi
from .models import (DcbmParams, ParameterError, ThetaSpec, population_quantities,
                     rho_for_expected_degree, sample_network, validate)
from .optim import TabuConfig, modularity_matrix_apply, spectral_bisect, tabu_search

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphFormatError", "BlockStats", "StatsDelta", "load_edge_list",
    "load_gml_subset", "largest_connected_component", "block_stats", "apply_switch",
    "Criterion", "evaluate", "evaluate_delta",
    "ThetaSpec", "DcbmParams", "ParameterError", "validate", "rho_for_expected_degree",
    "sample_network", "population_quantities",
    "TabuConfig", "tabu_search", "modularity_matrix_apply", "spectral_bisect",
    "adjusted_rand", "nmi",
]

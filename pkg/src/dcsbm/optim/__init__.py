"""Optimisers: tabu search over labellings and spectral bisection."""

from .spectral import SpectralResult, modularity_matrix_apply, spectral_bisect
from .tabu import SearchResult, TabuConfig, tabu_search

__all__ = [
    "TabuConfig",
    "SearchResult",
    "tabu_search",
    "SpectralResult",
    "modularity_matrix_apply",
    "spectral_bisect",
]

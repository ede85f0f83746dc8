"""Two-community analysis of the political blogs network.

The data file is never downloaded; point :func:`run_polblogs` at a local
copy of ``polblogs.gml`` (or an edge list plus a label file).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..graph import Graph, largest_connected_component, load_edge_list, load_gml_subset
from ..metrics import adjusted_rand
from ..optim import TabuConfig, spectral_bisect, tabu_search
from .io import read_labels

__all__ = ["degree_summary", "load_polblogs", "run_polblogs", "PolblogsReport", "default_polblogs_path"]


def default_polblogs_path() -> Path:
    env = os.environ.get("DCSBM_POLBLOGS")
    if env:
        return Path(env)
    return Path(os.environ.get("DCSBM_DATA_DIR", "data")) / "polblogs.gml"


def degree_summary(g: Graph) -> dict[str, float]:
    """Mean, median, min, quartiles (numpy's default linear rule) and max."""
    d = g.degree.astype(float)
    q1, med, q3 = np.percentile(d, [25, 50, 75])
    return {"mean": float(d.mean()), "median": float(med), "min": float(d.min()),
            "q1": float(q1), "q3": float(q3), "max": float(d.max())}


def load_polblogs(path=None, labels_path=None) -> tuple[Graph, np.ndarray]:
    """Largest component of the blog network and its hand labels."""
    path = Path(path) if path is not None else default_polblogs_path()
    if not path.exists():
        raise FileNotFoundError(f"polblogs data not found at {path}; "
                                "set DCSBM_POLBLOGS or pass the file path")
    if labels_path is None:
        g, labels = load_gml_subset(path.read_bytes())
        if labels is None:
            raise ValueError(f"{path} has nodes without a 'value' label")
    else:
        g = load_edge_list(path.read_bytes())
        labels = read_labels(Path(labels_path).read_text())
        if labels.size != g.n:
            raise ValueError(f"{labels.size} labels for {g.n} nodes")
    core, keep = largest_connected_component(g)
    return core, labels[keep]


@dataclass
class PolblogsReport:
    n: int
    L: int
    edges: int
    loops: int
    degrees: dict
    ari: dict = field(default_factory=dict)  # "tabu-ngm", "spectral-erm", ... -> ARI

    def lines(self) -> list[str]:
        out = [f"largest component: n={self.n}, edges={self.edges} (loops {self.loops}), L={self.L}",
               "degrees: " + ", ".join(f"{k} {v:.2f}" for k, v in self.degrees.items())]
        out += [f"{k:<14} ARI {v:.3f}" for k, v in self.ari.items()]
        return out


def run_polblogs(path=None, labels_path=None, tabu: TabuConfig | None = None,
                 seed: int = 0) -> PolblogsReport:
    g, truth = load_polblogs(path, labels_path)
    cfg = tabu or TabuConfig(seed=seed)
    rep = PolblogsReport(n=g.n, L=g.total_degree, edges=g.num_edges, loops=g.num_loops,
                         degrees=degree_summary(g))
    for kind in ("erm", "ngm", "bm", "dcbm"):
        rep.ari[f"tabu-{kind}"] = adjusted_rand(tabu_search(g, 2, kind, cfg).labels, truth)
    for kind in ("erm", "ngm"):
        rep.ari[f"spectral-{kind}"] = adjusted_rand(spectral_bisect(g, kind, seed=seed).labels, truth)
    return rep

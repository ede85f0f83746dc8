from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..criteria import Criterion
from ..graph import Graph
from ..models import make_rng

__all__ = ["modularity_matrix_apply", "spectral_bisect", "SpectralResult"]


def _check_kind(kind) -> Criterion:
    kind = Criterion.parse(kind)
    if kind not in (Criterion.ERM, Criterion.NGM):
        raise ValueError("spectral methods are defined for the modularities (erm, ngm) only")
    return kind


def modularity_matrix_apply(g: Graph, kind, v, _A=None) -> np.ndarray:
    """Compute ``B @ v`` without forming the modularity matrix ``B``.

    NGM: ``B = A - d d^T / L``. ERM: ``B = A - (L / n^2) 1 1^T``.
    """
    kind = _check_kind(kind)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (g.n,):
        raise ValueError(f"expected a vector of length {g.n}, got shape {v.shape}")
    A = g.to_scipy() if _A is None else _A
    L = g.total_degree
    if kind is Criterion.NGM:
        if L == 0:
            raise ValueError("criterion undefined on empty graph")
        d = g.degree.astype(np.float64)
        return A @ v - d * (d @ v) / L
    return A @ v - (L / g.n ** 2) * v.sum()


@dataclass
class SpectralResult:
    labels: np.ndarray
    eigenvector: np.ndarray
    eigenvalue: float
    iterations: int
    converged: bool


def spectral_bisect(g: Graph, kind, tol: float = 1e-10, max_iters: int = 100_000,
                    seed=0) -> SpectralResult:
    """Two-way split by the sign of the leading eigenvector of ``B``.

    Power iteration runs on ``B + c I`` where ``c`` bounds the spectral radius
    of ``B`` by its largest absolute row sum, so the top eigenvalue of ``B``
    becomes dominant. Nodes with nonnegative entries get label 0.
    """
    kind = _check_kind(kind)
    if g.n < 2:
        raise ValueError("spectral bisection needs at least two nodes")
    A = g.to_scipy()
    d = g.degree.astype(np.float64)
    L = float(g.total_degree)
    if kind is Criterion.NGM:
        shift = float(np.max(d + d * d.sum() / L)) if L else 0.0
    else:
        shift = float(np.max(d + L / g.n))
    shift = max(shift, 1.0)

    rng = make_rng(seed)
    v = rng.standard_normal(g.n)
    v /= np.linalg.norm(v)
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        w = modularity_matrix_apply(g, kind, v, _A=A) + shift * v
        norm = np.linalg.norm(w)
        if norm == 0:
            converged = True
            break
        w /= norm
        done = np.max(np.abs(w - v)) < tol
        v = w
        if done:
            converged = True
            break
    eigenvalue = float(v @ modularity_matrix_apply(g, kind, v, _A=A))
    labels = np.where(v >= 0, 0, 1).astype(np.int64)
    return SpectralResult(labels, v, eigenvalue, it, converged)

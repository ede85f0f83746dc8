"""Agreement between two partitions of the same node set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

__all__ = ["ContingencyTable", "contingency_table", "adjusted_rand", "nmi"]


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # counts[k, l] = #{i : e1_i = k, e2_i = l}

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def contingency_table(e1, e2) -> ContingencyTable:
    e1 = np.asarray(e1)
    e2 = np.asarray(e2)
    if e1.shape != e2.shape or e1.ndim != 1:
        raise ValueError(f"label vectors differ in length: {e1.shape} vs {e2.shape}")
    _, r = np.unique(e1, return_inverse=True)
    _, c = np.unique(e2, return_inverse=True)
    table = np.zeros((r.max(initial=-1) + 1, c.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (r, c), 1)
    return ContingencyTable(table)


def _pairs(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float((x * (x - 1) / 2).sum())


def adjusted_rand(e1, e2) -> float:
    """Hubert-Arabie adjusted Rand index.

    Returns 1.0 when the chance-corrected denominator vanishes together with
    the numerator (e.g. both partitions a single block, or both all singletons).
    """
    t = contingency_table(e1, e2)
    total = t.n * (t.n - 1) / 2
    sum_ij = _pairs(t.counts)
    sum_a = _pairs(t.row_sums)
    sum_b = _pairs(t.col_sums)
    expected = sum_a * sum_b / total if total else 0.0
    num = sum_ij - expected
    den = 0.5 * (sum_a + sum_b) - expected
    if den == 0:
        return 1.0 if num == 0 else 0.0
    return float(num / den)


def nmi(e1, e2) -> float:
    """Mutual information normalised by the geometric mean of the entropies.

    Both entropies zero gives 1; exactly one zero gives 0.
    """
    t = contingency_table(e1, e2)
    n = t.n
    if n == 0:
        return 1.0
    pxy = t.counts / n
    px = t.row_sums / n
    py = t.col_sums / n
    hx = -xlogy(px, px).sum()
    hy = -xlogy(py, py).sum()
    if hx == 0 and hy == 0:
        return 1.0
    if hx == 0 or hy == 0:
        return 0.0
    mi = xlogy(pxy, pxy).sum() - xlogy(pxy, np.outer(px, py)).sum()
    return float(np.clip(mi / np.sqrt(hx * hy), 0.0, 1.0))

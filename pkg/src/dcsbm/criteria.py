"""The four community detection criteria, evaluated from block statistics.

Each criterion is one of two shapes. The modularities share

    sum_k O_kk - sum_k w_k^2 * L / total^2

(ERM: ``w = counts``, ``total = n``; NGM: ``w = O_row``, ``total = L``),
and the profile likelihoods share

    sum_kl O_kl log(O_kl / (w_k w_l))

(BM: ``w = counts``; DCBM: ``w = O_row``). Scores are not divided by L.
Terms with ``O_kl = 0`` contribute nothing.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy.special import xlogy

from .graph import BlockStats, StatsDelta

__all__ = ["Criterion", "evaluate", "evaluate_delta", "modularity_form", "likelihood_form"]


class Criterion(str, enum.Enum):
    ERM = "erm"
    NGM = "ngm"
    BM = "bm"
    DCBM = "dcbm"

    @classmethod
    def parse(cls, value) -> "Criterion":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown criterion {value!r}; expected one of "
                             f"{', '.join(c.value for c in cls)}") from None

    @property
    def degree_corrected(self) -> bool:
        return self in (Criterion.NGM, Criterion.DCBM)

    @property
    def code(self) -> int:
        """Integer code used by the compiled search kernel."""
        return _CODES[self]


_CODES = {Criterion.ERM: 0, Criterion.NGM: 1, Criterion.BM: 2, Criterion.DCBM: 3}


def modularity_form(O, weights, total, L) -> float:
    O = np.asarray(O, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    return float(np.trace(O) - (w @ w) * L / float(total) ** 2)


def likelihood_form(O, weights) -> float:
    O = np.asarray(O, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    # sum_kl O_kl log(w_k w_l) = 2 sum_k O_k log w_k for symmetric O
    return float(xlogy(O, O).sum() - 2.0 * xlogy(O.sum(axis=1), w).sum())


def _weights(kind: Criterion, stats: BlockStats) -> np.ndarray:
    return stats.O_row if kind.degree_corrected else stats.counts


def evaluate(kind, stats: BlockStats) -> float:
    """Score of the labelling summarised by ``stats`` under criterion ``kind``."""
    kind = Criterion.parse(kind)
    if kind.degree_corrected and stats.L == 0:
        raise ValueError("criterion undefined on empty graph")
    w = _weights(kind, stats)
    if kind is Criterion.ERM:
        return modularity_form(stats.O, w, stats.n, stats.L)
    if kind is Criterion.NGM:
        return modularity_form(stats.O, w, stats.L, stats.L)
    return likelihood_form(stats.O, w)


def _g(x) -> float:
    x = float(x)
    return x * np.log(x) if x > 0 else 0.0


def evaluate_delta(kind, stats: BlockStats, delta: StatsDelta) -> float:
    """Change in score if ``delta`` were applied to ``stats``.

    Only the rows and columns of the two communities involved are touched.
    """
    kind = Criterion.parse(kind)
    a, b = delta.from_label, delta.to_label
    if delta.neighbor_counts.size != stats.K or not (0 <= a < stats.K and 0 <= b < stats.K):
        raise ValueError("delta does not match these block statistics")
    if stats.labels[delta.node] != a or stats.counts[a] < 1 or stats.O_row[a] < delta.degree:
        raise ValueError("delta does not match these block statistics")
    if kind.degree_corrected and stats.L == 0:
        raise ValueError("criterion undefined on empty graph")

    d = delta.degree
    changes = delta.O_changes()
    diag = changes.get((a, a), 0) + changes.get((b, b), 0)
    O_a, O_b = stats.O_row[a], stats.O_row[b]
    n_a, n_b = stats.counts[a], stats.counts[b]

    if kind is Criterion.ERM:
        return float(diag - stats.L / stats.n ** 2 * (2.0 * (n_b - n_a) + 2.0))
    if kind is Criterion.NGM:
        return float(diag - (2.0 * d * (O_b - O_a) + 2.0 * d * d) / stats.L)

    entry = sum(_g(stats.O[k, l] + c) - _g(stats.O[k, l]) for (k, l), c in changes.items())
    if kind is Criterion.DCBM:
        rows = _g(O_a - d) - _g(O_a) + _g(O_b + d) - _g(O_b)
    else:
        rows = (xlogy(O_a - d, n_a - 1) - xlogy(O_a, n_a)
                + xlogy(O_b + d, n_b + 1) - xlogy(O_b, n_b))
    return float(entry - 2.0 * rows)

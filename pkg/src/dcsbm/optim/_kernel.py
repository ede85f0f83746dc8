"""Compiled inner loop of the tabu search.

Criterion codes: 0 ERM, 1 NGM, 2 BM, 3 DCBM. Labels are 0-based.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _xlogy(x, y):
    if x == 0.0:
        return 0.0
    return x * np.log(y)


@njit(cache=True)
def _score(kind, O, O_row, counts, L, n):
    K = O.shape[0]
    if kind == 0 or kind == 1:
        s = 0.0
        for k in range(K):
            s += O[k, k]
        if kind == 0:
            w2 = 0.0
            for k in range(K):
                w2 += float(counts[k]) * counts[k]
            return s - w2 * L / (float(n) * n)
        w2 = 0.0
        for k in range(K):
            w2 += float(O_row[k]) * O_row[k]
        return s - w2 / L
    s = 0.0
    for k in range(K):
        for l in range(K):
            s += _xlogy(float(O[k, l]), float(O[k, l]))
    for k in range(K):
        w = O_row[k] if kind == 3 else counts[k]
        s -= 2.0 * _xlogy(float(O_row[k]), float(w))
    return s


@njit(cache=True)
def _move_gain(kind, i, a, b, N, loop, deg, O, O_row, counts, L, n, gO):
    """Score change when node ``i`` moves from community ``a`` to ``b``."""
    Na = N[i, a]
    Nb = N[i, b]
    d_aa = -2 * Na - loop
    d_bb = 2 * Nb + loop
    if kind == 0:
        return (d_aa + d_bb) - L / (float(n) * n) * (2.0 * (counts[b] - counts[a]) + 2.0)
    if kind == 1:
        return (d_aa + d_bb) - (2.0 * deg * (O_row[b] - O_row[a]) + 2.0 * deg * deg) / L
    K = O.shape[0]
    g = 0.0
    new = float(O[a, a] + d_aa)
    g += _xlogy(new, new) - gO[a, a]
    new = float(O[b, b] + d_bb)
    g += _xlogy(new, new) - gO[b, b]
    new = float(O[a, b] + Na - Nb)
    g += 2.0 * (_xlogy(new, new) - gO[a, b])
    for c in range(K):
        if c == a or c == b:
            continue
        Nc = N[i, c]
        if Nc == 0:
            continue
        new = float(O[a, c] - Nc)
        g += 2.0 * (_xlogy(new, new) - gO[a, c])
        new = float(O[b, c] + Nc)
        g += 2.0 * (_xlogy(new, new) - gO[b, c])
    Oa_new = float(O_row[a] - deg)
    Ob_new = float(O_row[b] + deg)
    if kind == 3:
        rows = (_xlogy(Oa_new, Oa_new) - _xlogy(float(O_row[a]), float(O_row[a]))
                + _xlogy(Ob_new, Ob_new) - _xlogy(float(O_row[b]), float(O_row[b])))
    else:
        rows = (_xlogy(Oa_new, float(counts[a] - 1)) - _xlogy(float(O_row[a]), float(counts[a]))
                + _xlogy(Ob_new, float(counts[b] + 1)) - _xlogy(float(O_row[b]), float(counts[b])))
    return g - 2.0 * rows


@njit(cache=True)
def neighbor_counts(indptr, indices, labels, K):
    n = labels.shape[0]
    N = np.zeros((n, K), dtype=np.int64)
    loops = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j == i:
                loops[i] = 1
            else:
                N[i, labels[j]] += 1
    return N, loops


@njit(cache=True)
def all_move_gains(kind, indptr, indices, labels, K, O, O_row, counts, L):
    """Gain of every (node, label) move; the current label gets NaN."""
    n = labels.shape[0]
    N, loops = neighbor_counts(indptr, indices, labels, K)
    gO = np.empty((K, K))
    for k in range(K):
        for l in range(K):
            gO[k, l] = _xlogy(float(O[k, l]), float(O[k, l]))
    out = np.full((n, K), np.nan)
    for i in range(n):
        deg = indptr[i + 1] - indptr[i]
        for b in range(K):
            if b != labels[i]:
                out[i, b] = _move_gain(kind, i, labels[i], b, N, loops[i], deg,
                                       O, O_row, counts, L, n, gO)
    return out


@njit(cache=True)
def tabu_run(kind, indptr, indices, labels, K, order, tenure, max_iters, max_stall):
    """One tabu search from ``labels`` (modified in place).

    Every iteration applies the best admissible move, improving or not. A
    node moved at iteration t is tabu through iteration t + tenure unless
    the move would beat the best score seen (aspiration). Returns the best
    labelling, its score and the best-so-far trace.
    """
    n = labels.shape[0]
    L = indices.shape[0]
    N, loops = neighbor_counts(indptr, indices, labels, K)
    O = np.zeros((K, K), dtype=np.int64)
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            O[labels[i], labels[indices[p]]] += 1
    O_row = np.zeros(K, dtype=np.int64)
    counts = np.zeros(K, dtype=np.int64)
    for i in range(n):
        counts[labels[i]] += 1
        O_row[labels[i]] += indptr[i + 1] - indptr[i]
    gO = np.empty((K, K))

    current = _score(kind, O, O_row, counts, L, n)
    best = current
    best_labels = labels.copy()
    tabu_until = np.full(n, -1, dtype=np.int64)
    trace = np.empty(max_iters)
    stall = 0
    it = 0
    while it < max_iters:
        for k in range(K):
            for l in range(K):
                gO[k, l] = _xlogy(float(O[k, l]), float(O[k, l]))
        best_gain = -np.inf
        bi = -1
        bb = -1
        for idx in range(n):
            i = order[idx]
            a = labels[i]
            deg = indptr[i + 1] - indptr[i]
            tabu = tabu_until[i] >= it
            for b in range(K):
                if b == a:
                    continue
                gain = _move_gain(kind, i, a, b, N, loops[i], deg, O, O_row, counts, L, n, gO)
                if tabu and not current + gain > best:
                    continue
                if gain > best_gain:
                    best_gain = gain
                    bi = i
                    bb = b
        if bi < 0:
            break
        # apply the move
        a = labels[bi]
        Na = N[bi, a]
        Nb = N[bi, bb]
        deg = indptr[bi + 1] - indptr[bi]
        for c in range(K):
            if c == a or c == bb:
                continue
            Nc = N[bi, c]
            O[a, c] -= Nc
            O[c, a] -= Nc
            O[bb, c] += Nc
            O[c, bb] += Nc
        O[a, a] -= 2 * Na + loops[bi]
        O[bb, bb] += 2 * Nb + loops[bi]
        O[a, bb] += Na - Nb
        O[bb, a] += Na - Nb
        O_row[a] -= deg
        O_row[bb] += deg
        counts[a] -= 1
        counts[bb] += 1
        labels[bi] = bb
        for p in range(indptr[bi], indptr[bi + 1]):
            j = indices[p]
            if j != bi:
                N[j, a] -= 1
                N[j, bb] += 1
        tabu_until[bi] = it + tenure

        # exact rescoring from integer statistics avoids drift
        current = _score(kind, O, O_row, counts, L, n)
        if current > best:
            best = current
            best_labels[:] = labels
            stall = 0
        else:
            stall += 1
        trace[it] = best
        it += 1
        if stall >= max_stall:
            break
    return best_labels, best, trace[:it]

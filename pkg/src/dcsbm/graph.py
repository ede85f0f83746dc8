"""Sparse undirected graphs and the block statistics computed from them.

Labels are 0-based integer arrays throughout the library (``0 .. K-1``);
only the label files read and written by the command line use ``1 .. K``.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Graph",
    "GraphFormatError",
    "BlockStats",
    "StatsDelta",
    "load_edge_list",
    "load_gml_subset",
    "largest_connected_component",
    "block_stats",
    "apply_switch",
    "check_labels",
]


class GraphFormatError(ValueError):
    """Raised when an edge list or GML file cannot be parsed."""


class Graph:
    """Immutable undirected binary graph stored as sorted neighbour lists.

    The lists live in CSR form (``indptr``/``indices``). A self-loop appears
    once in its node's list, so it contributes 1 to the degree and 1 to the
    total degree ``L``, matching ``L = sum_ij A_ij``.
    """

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, node_ids=None):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self.degree = np.diff(self.indptr)
        self.degree.setflags(write=False)
        self.node_ids = None if node_ids is None else tuple(node_ids)

    @classmethod
    def from_edges(cls, n: int, src: Iterable[int], dst: Iterable[int], node_ids=None) -> "Graph":
        """Build a graph from (possibly repeated, possibly one-directional) pairs."""
        src = np.asarray(list(src) if not isinstance(src, np.ndarray) else src, dtype=np.int64)
        dst = np.asarray(list(dst) if not isinstance(dst, np.ndarray) else dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint out of range")
        loops = src == dst
        rows = np.concatenate([src, dst[~loops]])
        cols = np.concatenate([dst, src[~loops]])
        # dedupe via linear keys, then sort by (row, col)
        keys = np.unique(rows * max(n, 1) + cols)
        rows, cols = np.divmod(keys, max(n, 1))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, cols, node_ids=node_ids)

    @property
    def total_degree(self) -> int:
        return int(self.indices.size)

    L = total_degree

    @property
    def num_loops(self) -> int:
        rows = np.repeat(np.arange(self.n), self.degree)
        return int(np.count_nonzero(rows == self.indices))

    @property
    def num_edges(self) -> int:
        """Undirected edge count, loops counted once."""
        return (self.total_degree - self.num_loops) // 2 + self.num_loops

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edges(self) -> np.ndarray:
        """Return an ``(m, 2)`` array of undirected edges with ``u <= v``."""
        rows = np.repeat(np.arange(self.n), self.degree)
        keep = rows <= self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def to_scipy(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray().astype(np.int64)

    def to_edge_list(self) -> str:
        ids = self.node_ids if self.node_ids is not None else range(self.n)
        ids = list(ids)
        return "".join(f"{ids[u]} {ids[v]}\n" for u, v in self.edges())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, L={self.total_degree})"


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def load_edge_list(source, n: int | None = None) -> Graph:
    """Parse a whitespace-separated edge list.

    ``source`` may be ``str``, ``bytes`` or a readable file object. Lines
    starting with ``#`` and blank lines are skipped. Node identifiers are
    arbitrary tokens, re-indexed densely in order of first appearance.
    If ``n`` is given, identifiers must instead be integers ``0 .. n-1`` and
    are used as indices directly (isolated nodes are then kept).
    """
    index: dict[str, int] = {}
    src, dst = [], []
    for lineno, line in enumerate(io.StringIO(_read_text(source)), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"line {lineno}: expected two node identifiers, got {len(tokens)}")
        if n is None:
            u, v = (index.setdefault(t, len(index)) for t in tokens)
        else:
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: node ids must be integers when n is given") from None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"line {lineno}: node id out of range [0, {n - 1}]")
        src.append(u)
        dst.append(v)
    if n is not None:
        return Graph.from_edges(n, src, dst)
    if not index:
        raise GraphFormatError("empty edge list")
    return Graph.from_edges(len(index), src, dst, node_ids=list(index))


_GML_TOKEN = re.compile(r'"[^"]*"|\[|\]|[^\s\[\]"]+')


def _parse_gml_tokens(tokens: list[str]) -> list:
    """Turn a token stream into nested ``[(key, value), ...]`` lists."""
    stack: list[list] = [[]]
    key = None
    for tok in tokens:
        if tok == "[":
            if key is None:
                raise GraphFormatError("'[' without a preceding key")
            child: list = []
            stack[-1].append((key, child))
            stack.append(child)
            key = None
        elif tok == "]":
            if key is not None:
                raise GraphFormatError(f"key {key!r} has no value")
            if len(stack) == 1:
                raise GraphFormatError("unbalanced brackets: unexpected ']'")
            stack.pop()
        elif key is None:
            key = tok
        else:
            stack[-1].append((key, tok.strip('"') if tok.startswith('"') else tok))
            key = None
    if len(stack) != 1:
        raise GraphFormatError("unbalanced brackets: missing ']'")
    if key is not None:
        raise GraphFormatError(f"key {key!r} has no value")
    return stack[0]


def load_gml_subset(source) -> tuple[Graph, np.ndarray | None]:
    """Read the small GML subset used by network data sets such as polblogs.

    Only ``node [ id .. value .. ]`` and ``edge [ source .. target .. ]``
    entries inside ``graph [ ... ]`` are interpreted; other keys are ignored.
    Edge direction is discarded. If every node carries a ``value``, the
    distinct values (sorted) are mapped to labels ``0, 1, ...`` and returned
    as the second element; otherwise that element is ``None``.
    """
    text = _read_text(source)
    tree = _parse_gml_tokens(_GML_TOKEN.findall(text))
    graphs = [v for k, v in tree if k == "graph" and isinstance(v, list)]
    if not graphs:
        raise GraphFormatError("no 'graph [ ... ]' block found")
    body = graphs[0]

    index: dict[str, int] = {}
    values: list = []
    src, dst = [], []
    for key, val in body:
        if key == "node" and isinstance(val, list):
            attrs = dict(kv for kv in val if not isinstance(kv[1], list))
            if "id" not in attrs:
                raise GraphFormatError("node without id")
            if attrs["id"] in index:
                raise GraphFormatError(f"duplicate node id {attrs['id']}")
            index[attrs["id"]] = len(index)
            values.append(attrs.get("value"))
    for key, val in body:
        if key == "edge" and isinstance(val, list):
            attrs = dict(kv for kv in val if not isinstance(kv[1], list))
            try:
                u, v = index[attrs["source"]], index[attrs["target"]]
            except KeyError as exc:
                raise GraphFormatError(f"edge references unknown or missing node {exc}") from None
            src.append(u)
            dst.append(v)
    if not index:
        raise GraphFormatError("graph has no nodes")

    g = Graph.from_edges(len(index), src, dst, node_ids=list(index))
    labels = None
    if all(v is not None for v in values):
        def _key(v):
            try:
                return (0, float(v), v)
            except ValueError:
                return (1, 0.0, v)
        distinct = sorted(set(values), key=_key)
        lookup = {v: k for k, v in enumerate(distinct)}
        labels = np.array([lookup[v] for v in values], dtype=np.int64)
    return g, labels


def largest_connected_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest component and its original node indices.

    Among components of equal size the one containing the smallest node
    index wins.
    """
    _, comp = connected_components(g.to_scipy(), directed=False)
    sizes = np.bincount(comp)
    # components are numbered in order of their smallest node, so argmax
    # already returns the lowest-index component among ties
    keep = np.flatnonzero(comp == np.argmax(sizes))
    return induced_subgraph(g, keep), keep


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> Graph:
    nodes = np.asarray(nodes, dtype=np.int64)
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[nodes] = np.arange(nodes.size)
    edges = g.edges()
    keep = (remap[edges[:, 0]] >= 0) & (remap[edges[:, 1]] >= 0)
    edges = remap[edges[keep]]
    ids = None if g.node_ids is None else [g.node_ids[i] for i in nodes]
    return Graph.from_edges(nodes.size, edges[:, 0], edges[:, 1], node_ids=ids)


def check_labels(labels, n: int, K: int | None = None) -> tuple[np.ndarray, int]:
    """Validate a 0-based label vector and return it with its community count."""
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {labels.shape}")
    if labels.size and not np.issubdtype(labels.dtype, np.integer):
        if not np.all(labels == np.round(labels)):
            raise ValueError("labels must be integers")
    labels = labels.astype(np.int64)
    if K is None:
        K = int(labels.max()) + 1 if labels.size else 1
    if labels.size and (labels.min() < 0 or labels.max() >= K):
        raise ValueError(f"labels must lie in [0, {K - 1}]")
    return labels, int(K)


@dataclass
class BlockStats:
    """Sufficient statistics of a labelled graph.

    ``O[k, l]`` counts ordered adjacent pairs (i, j) with labels (k, l);
    ``O_row[k]`` is the total degree of community ``k`` and ``counts[k]`` its
    size. The labelling itself is carried along so that switches can be
    computed and applied in place.
    """

    O: np.ndarray
    O_row: np.ndarray
    counts: np.ndarray
    L: int
    n: int
    labels: np.ndarray = field(repr=False)

    @property
    def K(self) -> int:
        return self.O.shape[0]

    def copy(self) -> "BlockStats":
        return BlockStats(self.O.copy(), self.O_row.copy(), self.counts.copy(),
                          self.L, self.n, self.labels.copy())

    def apply(self, delta: "StatsDelta") -> None:
        self._shift(delta, +1)
        self.labels[delta.node] = delta.to_label

    def revert(self, delta: "StatsDelta") -> None:
        self._shift(delta, -1)
        self.labels[delta.node] = delta.from_label

    def _shift(self, delta: "StatsDelta", sign: int) -> None:
        for (k, l), change in delta.O_changes().items():
            self.O[k, l] += sign * change
        a, b = delta.from_label, delta.to_label
        self.O_row[a] -= sign * delta.degree
        self.O_row[b] += sign * delta.degree
        self.counts[a] -= sign
        self.counts[b] += sign

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockStats):
            return NotImplemented
        return (
            self.L == other.L and self.n == other.n
            and np.array_equal(self.O, other.O)
            and np.array_equal(self.O_row, other.O_row)
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.labels, other.labels)
        )


@dataclass(frozen=True)
class StatsDelta:
    """Change to :class:`BlockStats` caused by moving one node.

    ``neighbor_counts[c]`` is the number of the node's neighbours (itself
    excluded) currently labelled ``c``; ``loop`` is 1 if the node has a
    self-loop.
    """

    node: int
    from_label: int
    to_label: int
    neighbor_counts: np.ndarray
    loop: int
    degree: int

    def O_changes(self) -> dict[tuple[int, int], int]:
        """Sparse entry-wise change of ``O``; zero entries are omitted."""
        a, b = self.from_label, self.to_label
        N = self.neighbor_counts
        out: dict[tuple[int, int], int] = {}
        for c in range(N.size):
            if c in (a, b) or N[c] == 0:
                continue
            out[a, c] = out[c, a] = -int(N[c])
            out[b, c] = out[c, b] = int(N[c])
        out[a, a] = -2 * int(N[a]) - self.loop
        out[b, b] = 2 * int(N[b]) + self.loop
        out[a, b] = out[b, a] = int(N[a] - N[b])
        return {k: v for k, v in out.items() if v}


def block_stats(g: Graph, labels, K: int | None = None) -> BlockStats:
    """Compute O, O_row, counts for ``labels`` on ``g`` from scratch."""
    labels, K = check_labels(labels, g.n, K)
    rows = np.repeat(labels, g.degree)
    cols = labels[g.indices]
    O = np.zeros((K, K), dtype=np.int64)
    np.add.at(O, (rows, cols), 1)
    return BlockStats(
        O=O,
        O_row=O.sum(axis=1),
        counts=np.bincount(labels, minlength=K).astype(np.int64),
        L=g.total_degree,
        n=g.n,
        labels=labels.copy(),
    )


def apply_switch(stats: BlockStats, g: Graph, node: int, to_label: int) -> StatsDelta:
    """Delta for relabelling ``node`` to ``to_label``; ``stats`` is left untouched.

    Cost is proportional to the node's degree plus ``K``.
    """
    if not 0 <= to_label < stats.K:
        raise ValueError(f"label {to_label} out of range for K={stats.K}")
    a = int(stats.labels[node])
    if to_label == a:
        raise ValueError(f"node {node} already has label {a}")
    nbrs = g.neighbors(node)
    loop = int(np.count_nonzero(nbrs == node))
    others = nbrs[nbrs != node]
    N = np.bincount(stats.labels[others], minlength=stats.K).astype(np.int64)
    return StatsDelta(node=int(node), from_label=a, to_label=int(to_label),
                      neighbor_counts=N, loop=loop, degree=int(nbrs.size))

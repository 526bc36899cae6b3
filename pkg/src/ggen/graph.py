"""Mutable simple undirected graph used by all generators.

Nodes are dense integers ``0..n-1``. Each node keeps a hash set of its
neighbors, and every edge is additionally stored as two directed arcs in
flat ``src``/``dst`` arrays so that a product with the adjacency matrix is
a single vectorized pass over the edges.
"""

from __future__ import annotations

import io
import re
from pathlib import Path
from typing import IO, Iterable

import numpy as np


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed."""


class Graph:
    """Simple undirected graph with O(1) edge toggles.

    Args:
        n: number of nodes, at least 1.
    """

    def __init__(self, n: int):
        n = int(n)
        if n < 1:
            raise ValueError(f"graph needs at least one node, got n={n}")
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.degrees = np.zeros(n, dtype=np.int64)
        self._src = np.empty(16, dtype=np.int64)
        self._dst = np.empty(16, dtype=np.int64)
        self._arcs = 0
        self._slot: dict[tuple[int, int], int] = {}
        self._sorted: list[np.ndarray | None] = [None] * n

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        g = cls(n)
        for u, v in edges:
            u, v = int(u), int(v)
            if u != v and not g.has_edge(u, v):
                g.toggle_edge(u, v)
        return g

    @property
    def m(self) -> int:
        return self._arcs // 2

    def copy(self) -> "Graph":
        return Graph.from_edges(self.n, self.edges())

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def neighbors(self, u: int) -> np.ndarray:
        """Sorted neighbor array of ``u`` (cached until ``u`` changes)."""
        cached = self._sorted[u]
        if cached is None:
            cached = np.array(sorted(self.adj[u]), dtype=np.int64)
            self._sorted[u] = cached
        return cached

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(u, v)`` with ``u < v``, lexicographically sorted."""
        return [(u, v) for u in range(self.n) for v in self.neighbors(u) if u < v]

    def _check_pair(self, u: int, w: int) -> None:
        if not (0 <= u < self.n and 0 <= w < self.n):
            raise IndexError(f"node out of range for n={self.n}: ({u}, {w})")
        if u == w:
            raise ValueError(f"self-loop on node {u} is not allowed")

    def toggle_edge(self, u: int, w: int) -> bool:
        """Flip the presence of edge {u, w}; return True if it now exists."""
        u, w = int(u), int(w)
        self._check_pair(u, w)
        self._sorted[u] = None
        self._sorted[w] = None
        if w in self.adj[u]:
            self.adj[u].remove(w)
            self.adj[w].remove(u)
            self.degrees[u] -= 1
            self.degrees[w] -= 1
            self._remove_arc(u, w)
            self._remove_arc(w, u)
            return False
        self.adj[u].add(w)
        self.adj[w].add(u)
        self.degrees[u] += 1
        self.degrees[w] += 1
        self._append_arc(u, w)
        self._append_arc(w, u)
        return True

    def _append_arc(self, a: int, b: int) -> None:
        k = self._arcs
        if k == len(self._src):
            self._src = np.resize(self._src, 2 * k)
            self._dst = np.resize(self._dst, 2 * k)
        self._src[k] = a
        self._dst[k] = b
        self._slot[(a, b)] = k
        self._arcs = k + 1

    def _remove_arc(self, a: int, b: int) -> None:
        k = self._slot.pop((a, b))
        last = self._arcs - 1
        if k != last:
            la, lb = int(self._src[last]), int(self._dst[last])
            self._src[k] = la
            self._dst[k] = lb
            self._slot[(la, lb)] = k
        self._arcs = last

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Return ``A @ x`` as float64 with one pass over the edge arcs.

        Integer inputs below 2**53 give exactly integral results.
        """
        k = self._arcs
        return np.bincount(self._src[:k], weights=x[self._dst[:k]], minlength=self.n)

    def adjacency_column(self, u: int) -> np.ndarray:
        col = np.zeros(self.n, dtype=np.int64)
        col[self.neighbors(u)] = 1
        return col

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        k = self._arcs
        a[self._src[:k], self._dst[:k]] = 1
        return a

    def to_sparse(self):
        """Adjacency as a ``scipy.sparse.csr_array`` of float64."""
        from scipy import sparse

        k = self._arcs
        return sparse.csr_array(
            (np.ones(k), (self._src[:k].copy(), self._dst[:k].copy())),
            shape=(self.n, self.n),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def new_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def star_graph(k: int) -> Graph:
    """K_{1,k} with center 0."""
    return Graph.from_edges(k + 1, ((0, i) for i in range(1, k + 1)))


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, ((i, a + j) for i in range(a) for j in range(b)))


_HEADER_N = re.compile(r"\bn=(\d+)")


def parse_edge_list(stream: IO[str] | IO[bytes]) -> tuple[Graph, list[int]]:
    """Parse a whitespace-separated edge list.

    Lines starting with ``%`` or ``#`` are comments. Extra columns (weights,
    timestamps) after the first two are ignored. Node ids are compacted to
    ``0..n-1`` in first-seen order, unless a comment header declares
    ``n=<count>`` and every id already lies in ``0..count-1``; then ids are
    kept verbatim so files written by :func:`save_edge_list` round-trip.

    Returns:
        The graph and the original id of each compacted node.
    """
    declared_n = None
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line:
            continue
        if line[0] in "%#":
            found = _HEADER_N.search(line)
            if found and declared_n is None and not pairs:
                declared_n = int(found.group(1))
            continue
        parts = line.split()
        if len(parts) < 2:
            raise GraphFormatError(f"line {lineno}: expected two node ids, got {line!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer node id in {line!r}") from None

    if declared_n is not None and declared_n >= 1 and all(
        0 <= a < declared_n and 0 <= b < declared_n for a, b in pairs
    ):
        g = Graph.from_edges(declared_n, ((a, b) for a, b in pairs if a != b))
        return g, list(range(declared_n))
    if not pairs:
        raise GraphFormatError("edge list is empty")

    index: dict[int, int] = {}
    edges = []
    for a, b in pairs:
        ia = index.setdefault(a, len(index))
        ib = index.setdefault(b, len(index))
        if ia != ib:
            edges.append((ia, ib))
    labels = [0] * len(index)
    for orig, i in index.items():
        labels[i] = orig
    return Graph.from_edges(len(index), edges), labels


def load_edge_list(source: str | Path | IO) -> Graph:
    """Load a graph from a path or an open text/byte stream."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return parse_edge_list(fh)[0]
    return parse_edge_list(source)[0]


def save_edge_list(g: Graph, sink: str | Path | IO[str], header: bool = True) -> None:
    """Write each edge once as ``u v`` with ``u < v`` in sorted order.

    The optional header is a ``%`` comment carrying the node count, so
    isolated trailing nodes are documented even though the body cannot
    represent them.
    """
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            save_edge_list(g, fh, header=header)
        return
    buf = io.StringIO()
    if header:
        buf.write(f"% undirected n={g.n} m={g.m}\n")
    for u, v in g.edges():
        buf.write(f"{u} {v}\n")
    sink.write(buf.getvalue())


def load_karate() -> Graph:
    """Zachary's karate club network (34 nodes, 78 edges)."""
    return load_edge_list(Path(__file__).with_name("data") / "karate.txt")

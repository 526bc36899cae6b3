"""Reference random graph generators and their fits to an observed graph."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

log = logging.getLogger(__name__)

MODELS = ("er", "mr", "cl", "ws", "ba")


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _pair_from_index(n: int, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map linear indices of the strict upper triangle (row-major) to pairs."""
    rows = np.arange(n, dtype=np.int64)
    starts = rows * n - rows * (rows + 1) // 2
    i = np.searchsorted(starts, k, side="right") - 1
    return i, k - starts[i] + i + 1


def gen_erdos_renyi(n: int, p: float, seed=None) -> Graph:
    """G(n, p): every node pair is an edge independently with probability p.

    Samples the edge count from the binomial law and then a uniform set of
    that many distinct pairs, which has the same distribution.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    rng = _rng(seed)
    pairs = n * (n - 1) // 2
    count = int(rng.binomial(pairs, p)) if pairs else 0
    idx = np.sort(rng.choice(pairs, size=count, replace=False)) if count else np.empty(0, np.int64)
    i, j = _pair_from_index(n, idx.astype(np.int64))
    return Graph.from_edges(n, zip(i.tolist(), j.tolist()))


@dataclass
class MolloyReedResult:
    graph: Graph
    erased_stubs: int
    repaired_pairs: int
    total_stubs: int

    @property
    def erasure_rate(self) -> float:
        return self.erased_stubs / self.total_stubs if self.total_stubs else 0.0


def molloy_reed(degrees, seed=None, repair_attempts: int = 50) -> MolloyReedResult:
    """Configuration model with bounded repair and erasure.

    Stubs are paired by a random permutation. A pair that would form a
    self-loop or duplicate edge is first retried against up to
    ``repair_attempts`` random existing edges with a degree-preserving
    switch ``(u, v), (a, b) -> (u, a), (v, b)``; whatever still cannot be
    placed is erased. Always terminates.
    """
    deg = np.asarray(degrees, dtype=np.int64)
    if (deg < 0).any():
        raise ValueError("degrees must be nonnegative")
    total = int(deg.sum())
    if total % 2:
        raise ValueError(f"degree sum must be even, got {total}")
    rng = _rng(seed)
    n = len(deg)
    stubs = rng.permutation(np.repeat(np.arange(n, dtype=np.int64), deg))
    g = Graph(max(n, 1))
    edges: list[tuple[int, int]] = []
    bad = []

    def add(a, b):
        edges.append((a, b))
        g.toggle_edge(a, b)

    for a, b in stubs.reshape(-1, 2).tolist():
        if a == b or g.has_edge(a, b):
            bad.append((a, b))
        else:
            add(a, b)

    repaired = 0
    erased = 0
    for u, v in bad:
        placed = False
        for _ in range(repair_attempts if edges else 0):
            k = int(rng.integers(len(edges)))
            a, b = edges[k]
            if rng.random() < 0.5:
                a, b = b, a
            if u == a or v == b or {u, a} == {v, b}:
                continue
            if g.has_edge(u, a) or g.has_edge(v, b):
                continue
            # replace (a, b) by (u, a) and (v, b)
            g.toggle_edge(a, b)
            last = edges.pop()
            if k < len(edges):
                edges[k] = last
            add(u, a)
            add(v, b)
            placed = True
            repaired += 1
            break
        if not placed:
            erased += 2
    if erased:
        log.info("molloy-reed erased %d of %d stubs", erased, total)
    return MolloyReedResult(g, erased, repaired, total)


def gen_molloy_reed(degrees, seed=None) -> Graph:
    return molloy_reed(degrees, seed).graph


def gen_chung_lu(degrees, seed=None) -> Graph:
    """Independent edges with probability ``min(1, d_i d_j / sum(d))``."""
    rng = _rng(seed)
    deg = np.asarray(degrees, dtype=np.float64)
    if (deg < 0).any():
        raise ValueError("degrees must be nonnegative")
    n = len(deg)
    total = deg.sum()
    g = Graph(max(n, 1))
    if total <= 0:
        return g
    capped = 0
    for i in range(n - 1):
        weight = deg[i] * deg[i + 1 :] / total
        capped += int((weight > 1).sum())
        hits = np.nonzero(rng.random(n - i - 1) < weight)[0] + i + 1
        for j in hits.tolist():
            g.toggle_edge(i, j)
    if capped:
        log.info("chung-lu capped %d pair probabilities at 1", capped)
    return g


def chung_lu_expected_edges(degrees) -> float:
    deg = np.asarray(degrees, dtype=np.float64)
    total = deg.sum()
    if total <= 0:
        return 0.0
    p = np.minimum(1.0, np.outer(deg, deg) / total)
    return float(np.triu(p, 1).sum())


def lattice_clustering(k: int) -> float:
    """Clustering of a ring lattice where each node links to k/2 per side."""
    return 3 * (k - 2) / (4 * (k - 1))


def watts_strogatz_beta(k: int, target_clustering: float) -> float:
    """Rewiring probability from ``c(beta) = c(0) (1 - beta)^3``."""
    c0 = lattice_clustering(k)
    if target_clustering >= c0:
        if target_clustering > c0:
            log.warning("target clustering %.4f above lattice value %.4f, using beta=0", target_clustering, c0)
        return 0.0
    if target_clustering <= 0:
        return 1.0
    return 1.0 - (target_clustering / c0) ** (1.0 / 3.0)


def ring_degree(mean_degree: float) -> int:
    return 2 * int(math.floor(mean_degree / 2 + 0.5))


def watts_strogatz(n: int, k: int, beta: float, seed=None) -> Graph:
    """Ring lattice with k neighbors per node; each lattice edge's far end
    is rewired with probability beta to a uniform node, avoiding loops and
    duplicates."""
    if k % 2 or k < 2:
        raise ValueError(f"lattice degree must be even and >= 2, got {k}")
    if k >= n:
        raise ValueError(f"lattice degree {k} needs more than {n} nodes")
    rng = _rng(seed)
    g = Graph(n)
    for j in range(1, k // 2 + 1):
        for i in range(n):
            g.toggle_edge(i, (i + j) % n)
    for j in range(1, k // 2 + 1):
        for i in range(n):
            w = (i + j) % n
            if rng.random() >= beta or not g.has_edge(i, w):
                continue
            if len(g.adj[i]) >= n - 1:
                continue
            new = int(rng.integers(n))
            while new == i or g.has_edge(i, new):
                new = int(rng.integers(n))
            g.toggle_edge(i, w)
            g.toggle_edge(i, new)
    return g


def gen_watts_strogatz(n: int, mean_degree: float, target_clustering: float, seed=None) -> Graph:
    if mean_degree < 2:
        raise ValueError(f"mean degree must be at least 2, got {mean_degree}")
    k = min(ring_degree(mean_degree), n - 1 - (n - 1) % 2)
    return watts_strogatz(n, k, watts_strogatz_beta(k, target_clustering), seed)


def gen_barabasi_albert(n: int, edges_per_node: int, seed=None) -> Graph:
    """Preferential attachment grown from a clique on ``edges_per_node + 1`` nodes."""
    k = int(edges_per_node)
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= edges_per_node < n, got {k} with n={n}")
    rng = _rng(seed)
    g = Graph(n)
    ends: list[int] = []
    for a in range(k + 1):
        for b in range(a + 1, k + 1):
            g.toggle_edge(a, b)
            ends += (a, b)
    for new in range(k + 1, n):
        chosen: set[int] = set()
        while len(chosen) < k:
            chosen.add(ends[int(rng.integers(len(ends)))])
        for t in sorted(chosen):
            g.toggle_edge(new, t)
            ends += (new, t)
    return g


@dataclass
class BaselineParams:
    model: str
    n: int
    p: float | None = None
    degrees: list[int] = field(default_factory=list)
    mean_degree: float | None = None
    clustering: float | None = None
    edges_per_node: int | None = None


def fit_baseline_params(g0: Graph, model: str) -> BaselineParams:
    """Read a model's parameters off an observed graph; no optimization."""
    n = g0.n
    if model == "er":
        pairs = n * (n - 1) // 2
        return BaselineParams(model, n, p=g0.m / pairs if pairs else 0.0)
    if model in ("mr", "cl"):
        return BaselineParams(model, n, degrees=[int(d) for d in g0.degrees])
    if model == "ws":
        from .counts import count_stars, count_triangles

        _, s, _, _ = count_stars(g0)
        c = 3 * count_triangles(g0) / s if s else 0.0
        return BaselineParams(model, n, mean_degree=2 * g0.m / n, clustering=c)
    if model == "ba":
        return BaselineParams(model, n, edges_per_node=max(1, int(math.floor(g0.m / n + 0.5))))
    raise ValueError(f"unknown baseline model {model!r}")


def generate_baseline(params: BaselineParams, seed=None) -> Graph:
    if params.model == "er":
        return gen_erdos_renyi(params.n, params.p, seed)
    if params.model == "mr":
        return gen_molloy_reed(params.degrees, seed)
    if params.model == "cl":
        return gen_chung_lu(params.degrees, seed)
    if params.model == "ws":
        return gen_watts_strogatz(params.n, params.mean_degree, params.clustering, seed)
    if params.model == "ba":
        return gen_barabasi_albert(params.n, params.edges_per_node, seed)
    raise ValueError(f"unknown baseline model {params.model!r}")

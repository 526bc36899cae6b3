"""Statistics that the generator does not optimize, and plot-ready distributions.

Scalar statistics raise :class:`UndefinedStatistic` when their value does not
exist for the given graph (zero variance, no wedges, ...). The aggregate
:func:`derived_stats` turns those into ``None`` plus a flag so a report can
always be produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, splu

from .counts import SubgraphCounts
from .graph import Graph

SPECTRUM_MAX_NODES = 5000
EXACT_BFS_MAX_NODES = 50_000
BFS_SAMPLE_SOURCES = 2000


class UndefinedStatistic(ValueError):
    """The statistic has no value on this graph."""


class ConvergenceError(RuntimeError):
    """An iterative eigensolver stopped early; ``estimate`` is its best value."""

    def __init__(self, message: str, estimate: float | None):
        super().__init__(message)
        self.estimate = estimate


@dataclass
class DistributionSeries:
    kind: str
    x: np.ndarray
    y: np.ndarray
    meta: dict = field(default_factory=dict)

    def pairs(self):
        return list(zip(self.x.tolist(), self.y.tolist()))


def clustering_coefficient(counts: SubgraphCounts) -> float:
    if counts.s == 0:
        raise UndefinedStatistic("clustering undefined without wedges (s=0)")
    return 3 * counts.t / counts.s


def gini_degree(g: Graph) -> float:
    d = np.sort(g.degrees).astype(np.float64)
    n = len(d)
    total = d.sum()
    if total == 0:
        raise UndefinedStatistic("gini undefined when every degree is zero")
    i = np.arange(1, n + 1)
    return float(2 * (i * d).sum() / (n * total) - (n + 1) / n)


def power_law_mle(degrees) -> float:
    """Discrete maximum-likelihood exponent with ``d_min`` the smallest nonzero degree.

    Raises:
        UndefinedStatistic: if no degree is positive, or all positive
            degrees are equal, in which case the tail carries no slope
            information.
    """
    d = np.asarray(degrees, dtype=np.float64)
    d = d[d > 0]
    if not len(d):
        raise UndefinedStatistic("power-law exponent undefined without edges")
    dmin = d.min()
    if d.max() == dmin:
        raise UndefinedStatistic("power-law estimate diverges: all degrees equal d_min")
    return float(1 + len(d) / np.log(d / (dmin - 0.5)).sum())


def power_law_exponent(g: Graph) -> float:
    return power_law_mle(g.degrees)


def assortativity(g: Graph) -> float:
    """Pearson correlation of degrees at the two ends of every edge (both orientations)."""
    if g.m == 0:
        raise UndefinedStatistic("assortativity undefined without edges")
    k = g._arcs
    a = g.degrees[g._src[:k]].astype(np.float64)
    b = g.degrees[g._dst[:k]].astype(np.float64)
    a -= a.mean()
    b -= b.mean()
    va, vb = (a * a).sum(), (b * b).sum()
    if va == 0 or vb == 0:
        raise UndefinedStatistic("assortativity undefined: endpoint degrees have zero variance")
    return float((a * b).sum() / math.sqrt(va * vb))


def _start_vector(n: int) -> np.ndarray:
    # fixed start keeps ARPACK results reproducible
    return np.random.default_rng(12345).random(n) + 0.5


def spectral_norm(g: Graph, tolerance: float = 1e-8, maxiter: int | None = None) -> float:
    if g.m == 0:
        raise UndefinedStatistic("spectral norm of an empty graph is 0 and not reported")
    if g.n < 3:
        return float(np.abs(np.linalg.eigvalsh(g.to_dense().astype(float))).max())
    a = g.to_sparse()
    try:
        vals = eigsh(a, k=1, which="LM", tol=tolerance, v0=_start_vector(g.n), maxiter=maxiter, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        partial = float(np.abs(exc.eigenvalues).max()) if len(exc.eigenvalues) else None
        raise ConvergenceError("spectral norm did not converge", partial) from None
    return float(abs(vals[0]))


def largest_component(g: Graph) -> np.ndarray:
    """Sorted node ids of the largest connected component (lowest label on ties)."""
    _, labels = csgraph.connected_components(g.to_sparse(), directed=False)
    sizes = np.bincount(labels)
    return np.flatnonzero(labels == int(np.argmax(sizes)))


def _component_graph(g: Graph) -> tuple[sparse.csr_array, float]:
    nodes = largest_component(g)
    a = g.to_sparse()[nodes][:, nodes]
    return sparse.csr_array(a), len(nodes) / g.n


def algebraic_connectivity(g: Graph, tolerance: float = 1e-8) -> tuple[float, bool]:
    """Second-smallest Laplacian eigenvalue of the largest component.

    Returns:
        The eigenvalue and whether the graph was connected. For a
        disconnected graph the value of the whole graph would be 0.
    """
    if g.m == 0:
        raise UndefinedStatistic("algebraic connectivity undefined without edges")
    a, coverage = _component_graph(g)
    lap = csgraph.laplacian(a)
    n = a.shape[0]
    if n <= 3:
        return float(np.linalg.eigvalsh(lap.toarray())[1]), coverage == 1.0
    try:
        # shift-invert around -1: L + I is positive definite; a symmetric
        # ordering keeps the LU fill small on hub-heavy graphs
        lu = splu(sparse.csc_matrix(lap + sparse.identity(n)), permc_spec="MMD_AT_PLUS_A")
        op = LinearOperator((n, n), matvec=lu.solve, dtype=np.float64)
        vals = eigsh(lap, k=2, sigma=-1.0, which="LM", tol=tolerance, v0=_start_vector(n), OPinv=op, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        partial = float(np.sort(exc.eigenvalues)[1]) if len(exc.eigenvalues) > 1 else None
        raise ConvergenceError("algebraic connectivity did not converge", partial) from None
    return float(np.sort(vals)[1]), coverage == 1.0


@dataclass
class DistanceResult:
    diameter: int
    mean_distance: float
    cdf: DistributionSeries
    coverage: float
    sources: int


def _logistic(h: np.ndarray, pairs: int) -> np.ndarray:
    top = 1 - 1 / (2 * pairs)
    h = np.minimum(h, top)
    return np.log(h / (1 - h))


@njit(cache=True)
def _bfs_histogram(indptr, indices, sources):
    """Counts of (source, target) pairs at each hop distance."""
    n = indptr.shape[0] - 1
    hist = np.zeros(n, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in sources:
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    hist[dist[w]] += 1
                    queue[tail] = w
                    tail += 1
    return hist


def distances(g: Graph, seed=0, max_exact: int = EXACT_BFS_MAX_NODES, sample: int = BFS_SAMPLE_SOURCES) -> DistanceResult:
    """Breadth-first distances inside the largest component.

    Every node is a source up to ``max_exact`` component nodes; above that a
    seeded sample of ``sample`` sources is used and reported.
    """
    if g.m == 0:
        raise UndefinedStatistic("distances undefined without edges")
    a, coverage = _component_graph(g)
    n = a.shape[0]
    if n <= max_exact:
        sources = np.arange(n)
    else:
        sources = np.sort(np.random.default_rng(seed).choice(n, size=sample, replace=False))
    hist = _bfs_histogram(a.indptr.astype(np.int64), a.indices.astype(np.int64), sources.astype(np.int64))
    diameter = int(np.flatnonzero(hist).max())
    hist = hist[: diameter + 1]
    reached = int(hist.sum())
    d = np.arange(diameter + 1)
    mean = float((d * hist).sum() / reached)
    h = np.cumsum(hist[1:]) / reached
    pairs = n * (n - 1) // 2
    cdf = DistributionSeries(
        "distance-cdf",
        d[1:].astype(float),
        h,
        {"logistic": _logistic(h, pairs).tolist(), "transform": "ln(H/(1-H)), H capped at 1-1/(2*pairs)", "pairs": pairs},
    )
    return DistanceResult(diameter, mean, cdf, coverage, len(sources))


def degree_ccdf(g: Graph) -> DistributionSeries:
    """Fraction of nodes with degree at least ``k`` for ``k = 1..max degree``."""
    n = g.n
    dmax = int(g.degrees.max())
    counts = np.bincount(g.degrees, minlength=dmax + 1)
    at_least = counts[::-1].cumsum()[::-1] / n
    k = np.arange(1, dmax + 1)
    return DistributionSeries("degree-ccdf", k.astype(float), at_least[1:].astype(float))


def local_clustering(g: Graph) -> np.ndarray:
    """Per-node ``t_u / C(d_u, 2)``; NaN where ``d_u < 2``."""
    a = g.to_sparse()
    tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2
    d = g.degrees.astype(np.float64)
    wedges = d * (d - 1) / 2
    out = np.full(g.n, np.nan)
    ok = d >= 2
    out[ok] = tri[ok] / wedges[ok]
    return out


def local_clustering_distribution(g: Graph) -> DistributionSeries:
    """Empirical CDF of local clustering over nodes of degree at least 2."""
    values = local_clustering(g)
    kept = np.sort(values[~np.isnan(values)])
    y = np.arange(1, len(kept) + 1) / max(len(kept), 1)
    return DistributionSeries("local-clustering", kept, y, {"excluded": int(np.isnan(values).sum())})


def normalized_adjacency(g: Graph) -> tuple[np.ndarray, int]:
    keep = np.flatnonzero(g.degrees > 0)
    a = g.to_dense()[np.ix_(keep, keep)].astype(float)
    s = 1 / np.sqrt(g.degrees[keep].astype(float))
    return a * s[:, None] * s[None, :], g.n - len(keep)


def normalized_spectrum(g: Graph, cap: int = SPECTRUM_MAX_NODES) -> DistributionSeries:
    """All eigenvalues of ``D^-1/2 A D^-1/2`` over non-isolated nodes, ascending."""
    size = int((g.degrees > 0).sum())
    if size > cap:
        raise ValueError(f"dense spectrum refused for {size} nodes (cap {cap}); analyze a subsample")
    if size == 0:
        return DistributionSeries("normalized-spectrum", np.empty(0), np.empty(0), {"isolated_dropped": g.n})
    n_mat, dropped = normalized_adjacency(g)
    vals = np.clip(np.linalg.eigvalsh(n_mat), -1.0, 1.0)
    rank = np.arange(1, size + 1) / size
    return DistributionSeries("normalized-spectrum", vals, rank, {"isolated_dropped": dropped})


@dataclass
class DerivedStats:
    G: float | None
    gamma: float | None
    c: float | None
    rho: float | None
    spectral_norm: float | None
    algebraic_connectivity: float | None
    diameter: int | None
    mean_distance: float | None
    coverage: float = 1.0
    flags: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "G": self.G,
            "gamma": self.gamma,
            "c": self.c,
            "rho": self.rho,
            "spectral_norm": self.spectral_norm,
            "algebraic_connectivity": self.algebraic_connectivity,
            "diameter": self.diameter,
            "mean_distance": self.mean_distance,
        }


def derived_stats(g: Graph, counts: SubgraphCounts, tolerance: float = 1e-8, dist: DistanceResult | None = None) -> DerivedStats:
    """All derived scalars; ``dist`` reuses an earlier :func:`distances` result."""
    flags: dict[str, str] = {}

    def attempt(name, fn):
        try:
            return fn()
        except UndefinedStatistic as exc:
            flags[name] = f"undefined: {exc}"
        except ConvergenceError as exc:
            flags[name] = f"not converged, partial estimate {exc.estimate}"
        return None

    lam2 = attempt("algebraic_connectivity", lambda: algebraic_connectivity(g, tolerance))
    if dist is None:
        dist = attempt("distances", lambda: distances(g))
    coverage = dist.coverage if dist else 1.0
    if lam2 is not None and not lam2[1]:
        flags["algebraic_connectivity"] = "computed on the largest component"
    if dist is not None and coverage < 1.0:
        flags["distances"] = f"largest component only, coverage {coverage:.6g}"
    if dist is not None and dist.sources < round(coverage * g.n):
        flags["distances"] = flags.get("distances", "") + f"; sampled {dist.sources} sources"
    flags["gamma_note"] = "d_min fixed to the minimum nonzero degree"
    return DerivedStats(
        G=attempt("G", lambda: gini_degree(g)),
        gamma=attempt("gamma", lambda: power_law_exponent(g)),
        c=attempt("c", lambda: clustering_coefficient(counts)),
        rho=attempt("rho", lambda: assortativity(g)),
        spectral_norm=attempt("spectral_norm", lambda: spectral_norm(g, tolerance)),
        algebraic_connectivity=lam2[0] if lam2 else None,
        diameter=dist.diameter if dist else None,
        mean_distance=dist.mean_distance if dist else None,
        coverage=coverage,
        flags=flags,
    )

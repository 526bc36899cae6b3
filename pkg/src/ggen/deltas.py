"""Vectorized change of each subgraph count when toggling edges at a pivot.

For a pivot ``u`` every function returns a length-``n`` integer vector
whose entry ``w`` is ``S(G ± {u, w}) - S(G)``. The entry at ``w = u`` is
meaningless and must be ignored by callers.

Notation in the code: ``a`` is the adjacency column of ``u``, ``d`` the
degree vector and ``du`` the pivot degree. Only the triangle and square
deltas need products with the adjacency matrix; both go through
:meth:`Graph.matvec`, one pass over the edges each, and ``A @ A @ a`` is
never formed as a matrix.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numba import njit

from .counts import STATISTICS
from .graph import Graph

# A @ (A @ a) is accumulated in float64 and must stay exact
MAX_DEGREE = 200_000


class DeltaVector(NamedTuple):
    statistic: str
    pivot: int
    values: np.ndarray


def _check(g: Graph, u: int) -> None:
    if not 0 <= u < g.n:
        raise IndexError(f"pivot {u} out of range for n={g.n}")


def _exact(v: np.ndarray) -> np.ndarray:
    return np.rint(v).astype(np.int64)


def _star_terms(g: Graph, u: int):
    a = g.adjacency_column(u)
    d = g.degrees
    return a, d, int(d[u]), 1 - 2 * a


def delta_edges(g: Graph, u: int) -> DeltaVector:
    _check(g, u)
    return DeltaVector("m", u, 1 - 2 * g.adjacency_column(u))


def delta_wedges(g: Graph, u: int) -> DeltaVector:
    _check(g, u)
    a, d, du, dm = _star_terms(g, u)
    return DeltaVector("s", u, dm * (d + du) + 2 * a)


def _claws(a, d, du, dm):
    # evaluated on post-removal degrees when the edge exists; k(k-1) is even
    dw = d - a
    dp = du - a
    return dm * ((dw * (dw - 1)) // 2 + (dp * (dp - 1)) // 2)


def delta_claws(g: Graph, u: int) -> DeltaVector:
    _check(g, u)
    return DeltaVector("z", u, _claws(*_star_terms(g, u)))


def _crosses(a, d, du, dm):
    # each bracket is a product of three consecutive integers up to sign
    return (
        (d - 1) * (d - 2) * (a * (3 - 2 * d) + d) // 6
        + (du - 1) * (du - 2) * ((3 - 2 * du) * a + du) // 6
    )


def delta_crosses(g: Graph, u: int) -> DeltaVector:
    _check(g, u)
    return DeltaVector("x", u, _crosses(*_star_terms(g, u)))


def delta_triangles(g: Graph, u: int) -> DeltaVector:
    _check(g, u)
    a = g.adjacency_column(u)
    common = _exact(g.matvec(a))
    return DeltaVector("t", u, common * (1 - 2 * a))


def delta_squares(g: Graph, u: int) -> DeltaVector:
    _check(g, u)
    a = g.adjacency_column(u)
    d = g.degrees
    walks3 = _exact(g.matvec(g.matvec(a)))
    return DeltaVector("q", u, walks3 * (1 - 2 * a) + a * (d + int(d[u]) - 1))


@lru_cache(maxsize=8)
def _star_table(n: int) -> np.ndarray:
    """``(6, n)`` table indexed by degree ``k``.

    Rows 0-2 hold ``C(k, 1..3)``, the stars gained at an endpoint of degree
    ``k`` when an edge is added. Rows 3-5 hold ``-C(k - 1, 1..3)``, those lost
    when an incident edge is removed (degree ``k`` before removal).
    """
    k = np.arange(n, dtype=np.int64)
    j = k - 1
    return np.stack(
        [k, k * (k - 1) // 2, k * (k - 1) * (k - 2) // 6, -j, -(j * (j - 1) // 2), -(j * (j - 1) * (j - 2) // 6)]
    )


def delta_matrix(g: Graph, u: int) -> np.ndarray:
    """All six deltas stacked as a ``(6, n)`` int64 array in ``STATISTICS`` order.

    The star rows use a lookup table of the same binomial closed forms as
    :func:`delta_wedges`, :func:`delta_claws` and :func:`delta_crosses`;
    the triangle and square rows share one adjacency product.

    Raises:
        OverflowError: if the maximum degree is too large for exact
            64-bit evaluation.
    """
    _check(g, u)
    n = g.n
    d = g.degrees
    nbrs = g.neighbors(u)
    if n > MAX_DEGREE + 1 and int(d.max()) > MAX_DEGREE:
        raise OverflowError(f"max degree {int(d.max())} exceeds exact delta range {MAX_DEGREE}")
    table = _star_table(n)
    du = int(d[u])
    present = np.zeros(n, dtype=bool)
    present[nbrs] = True

    out = np.empty((6, n), dtype=np.int64)
    per_node = table[:, d]
    np.copyto(out[1:4], per_node[:3] + table[:3, du, None])
    np.copyto(out[1:4], per_node[3:] + table[3:, du, None], where=present)
    dm = out[0]
    dm.fill(1)
    dm[nbrs] = -1

    col = present.astype(np.float64)
    common_f = g.matvec(col)
    walks3 = _exact(g.matvec(common_f))
    np.multiply(_exact(common_f), dm, out=out[4])
    np.multiply(walks3, dm, out=out[5])
    out[5, nbrs] += d[nbrs] + (du - 1)
    return out


def delta_all(g: Graph, u: int) -> dict[str, DeltaVector]:
    rows = delta_matrix(g, u)
    return {name: DeltaVector(name, u, rows[i]) for i, name in enumerate(STATISTICS)}


@njit(cache=True)
def _pair_deltas(a_w, dw, du, common_w, walks3_w, out):
    if a_w:
        p, q = dw - 1, du - 1
        out[0] = -1
        out[1] = -(p + q)
        out[2] = -(p * (p - 1) // 2 + q * (q - 1) // 2)
        out[3] = -(p * (p - 1) * (p - 2) // 6 + q * (q - 1) * (q - 2) // 6)
        out[4] = -common_w
        out[5] = -walks3_w + dw + du - 1
    else:
        out[0] = 1
        out[1] = dw + du
        out[2] = dw * (dw - 1) // 2 + du * (du - 1) // 2
        out[3] = dw * (dw - 1) * (dw - 2) // 6 + du * (du - 1) * (du - 2) // 6
        out[4] = common_w
        out[5] = walks3_w


@njit(cache=True)
def _pivot_products(src, dst, n, u):
    """Adjacency column of ``u``, ``A a`` and ``A A a`` by passes over the arcs."""
    a = np.zeros(n, dtype=np.int64)
    for k in range(src.shape[0]):
        if src[k] == u:
            a[dst[k]] = 1
    common = np.zeros(n, dtype=np.int64)
    for k in range(src.shape[0]):
        common[src[k]] += a[dst[k]]
    walks3 = np.zeros(n, dtype=np.int64)
    for k in range(src.shape[0]):
        walks3[src[k]] += common[dst[k]]
    return a, common, walks3


@njit(cache=True)
def _scan(a, common, walks3, degrees, u, rows, offsets, scale, weights):
    n = degrees.shape[0]
    du = degrees[u]
    d6 = np.empty(6, dtype=np.int64)
    best = np.inf
    best_w = 0 if u != 0 else 1
    for w in range(n):
        if w == u:
            continue
        _pair_deltas(a[w], degrees[w], du, common[w], walks3[w], d6)
        # same operation order as the vectorized objective, so scores agree bitwise
        score = 0.0
        for i in range(rows.shape[0]):
            e = float(d6[rows[i]] + offsets[i]) * scale[i]
            score += weights[i] * (e * e)
        if score < best:
            best = score
            best_w = w
    out = np.empty(6, dtype=np.int64)
    _pair_deltas(a[best_w], degrees[best_w], du, common[best_w], walks3[best_w], out)
    return best_w, out, best


def best_toggle(g: Graph, u: int, rows: np.ndarray, offsets: np.ndarray, scale: np.ndarray, weights: np.ndarray):
    """Candidate ``w`` minimizing the weighted squared relative error after toggling ``{u, w}``.

    Compiled equivalent of scoring every column of :func:`delta_matrix`;
    ``rows`` selects statistics and ``offsets`` are current counts minus
    targets for those rows. Ties go to the lowest index.

    Returns:
        ``(w, deltas of w in STATISTICS order, score)``.
    """
    _check(g, u)
    if g.n < 2:
        raise ValueError("need at least two nodes to toggle an edge")
    d = g.degrees
    if g.n > MAX_DEGREE + 1 and int(d.max()) > MAX_DEGREE:
        raise OverflowError(f"max degree {int(d.max())} exceeds exact delta range {MAX_DEGREE}")
    k = g._arcs
    a, common, walks3 = _pivot_products(g._src[:k], g._dst[:k], g.n, u)
    w, deltas, score = _scan(a, common, walks3, d, u, rows, offsets, scale, weights)
    return int(w), deltas, float(score)

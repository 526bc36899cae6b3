"""Exact counts of the six optimized subgraph patterns.

``m`` edges, ``s`` wedges (2-stars), ``z`` claws (3-stars), ``x`` crosses
(4-stars), ``t`` triangles and ``q`` squares (4-cycles). Star and cycle
counts are non-induced: a triangle contains three wedges.

All counts are Python integers so they never wrap.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np
from scipy import sparse

from .graph import Graph

STATISTICS = ("m", "s", "z", "x", "t", "q")
ORACLE_MAX_NODES = 64


@dataclass(frozen=True)
class SubgraphCounts:
    m: int = 0
    s: int = 0
    z: int = 0
    x: int = 0
    t: int = 0
    q: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if int(value) != value:
                raise TypeError(f"count {f.name} must be integral, got {value!r}")
            object.__setattr__(self, f.name, int(value))

    def __getitem__(self, name: str) -> int:
        return getattr(self, name)

    def as_tuple(self) -> tuple[int, ...]:
        return astuple(self)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(STATISTICS, self.as_tuple()))

    @classmethod
    def from_mapping(cls, values) -> "SubgraphCounts":
        return cls(**{k: int(values[k]) for k in STATISTICS if k in values})


def count_stars(g: Graph) -> tuple[int, int, int, int]:
    """Return ``(m, s, z, x)`` from binomial sums over the degree sequence."""
    degs, mult = np.unique(g.degrees, return_counts=True)
    pairs = [(int(d), int(c)) for d, c in zip(degs, mult)]
    m = sum(d * c for d, c in pairs)
    assert m % 2 == 0
    return (
        m // 2,
        sum(c * comb(d, 2) for d, c in pairs),
        sum(c * comb(d, 3) for d, c in pairs),
        sum(c * comb(d, 4) for d, c in pairs),
    )


def _int_adjacency(g: Graph) -> sparse.csr_array:
    return g.to_sparse().astype(np.int64)


def count_triangles(g: Graph) -> int:
    a = _int_adjacency(g)
    # each triangle is seen from 3 edges in both orientations
    return int((a @ a).multiply(a).sum()) // 6


def count_squares(g: Graph) -> int:
    """4-cycles from common-neighbor counts of node pairs.

    A pair ``{i, j}`` with ``c`` common neighbors spans ``C(c, 2)`` squares
    as a diagonal, and every square has two diagonals.
    """
    a = _int_adjacency(g)
    common = (a @ a).tocoo()
    off = common.row != common.col
    c = common.data[off]
    _guard_int64(c, len(c))
    total = int((c * (c - 1) // 2).sum())
    # ordered pairs count each diagonal twice
    assert total % 4 == 0
    return total // 4


def squares_by_closed_walks(g: Graph) -> int:
    """4-cycles via ``tr(A^4) = 8q + 4s + 2m``."""
    a = _int_adjacency(g)
    a2 = a @ a
    _guard_int64(a2.data, a2.nnz)
    closed = int((a2.data * a2.data).sum())
    m, s, _, _ = count_stars(g)
    rest = closed - 2 * m - 4 * s
    assert rest % 8 == 0
    return rest // 8


def _guard_int64(values: np.ndarray, terms: int) -> None:
    """Fail if a sum of ``terms`` squares of ``values`` could exceed int64."""
    if len(values) and float(values.max()) ** 2 * max(terms, 1) >= 2.0**62:
        raise OverflowError("square count exceeds 64-bit accumulator range")


def count_all(g: Graph) -> SubgraphCounts:
    m, s, z, x = count_stars(g)
    return SubgraphCounts(m, s, z, x, count_triangles(g), count_squares(g))


@lru_cache(maxsize=None)
def _subsets(n: int, k: int) -> np.ndarray:
    if n < k:
        return np.empty((0, k), dtype=np.int64)
    return np.array(list(combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def oracle_counts(g: Graph) -> SubgraphCounts:
    """Count every pattern by listing node subsets explicitly.

    Independent of the degree formulas and matrix identities above; meant as
    the reference in tests.

    Raises:
        ValueError: if ``g.n`` exceeds ``ORACLE_MAX_NODES``.
    """
    n = g.n
    if n > ORACLE_MAX_NODES:
        raise ValueError(f"oracle enumeration refused for n={n} > {ORACLE_MAX_NODES}")
    a = g.to_dense().astype(bool)

    pairs = _subsets(n, 2)
    m = int(a[pairs[:, 0], pairs[:, 1]].sum())

    # k-stars: a center together with k other nodes all adjacent to it
    stars = []
    for k in (2, 3, 4):
        total = 0
        leaves = _subsets(n - 1, k)
        for c in range(n):
            others = np.delete(np.arange(n), c)
            if len(leaves):
                total += int(a[c, others[leaves]].all(axis=1).sum())
        stars.append(total)

    triples = _subsets(n, 3)
    i, j, k = triples.T if len(triples) else (np.empty(0, int),) * 3
    t = int((a[i, j] & a[j, k] & a[i, k]).sum())

    quads = _subsets(n, 4)
    q = 0
    if len(quads):
        p0, p1, p2, p3 = quads.T
        # the three distinct Hamiltonian cycles on four labelled nodes
        for w, x_, y, z in ((p0, p1, p2, p3), (p0, p1, p3, p2), (p0, p2, p1, p3)):
            q += int((a[w, x_] & a[x_, y] & a[y, z] & a[z, w]).sum())

    return SubgraphCounts(m, stars[0], stars[1], stars[2], t, q)

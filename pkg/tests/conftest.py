import itertools

import numpy as np
import pytest

from ggen.baselines import gen_erdos_renyi
from ggen.counts import oracle_counts
from ggen.deltas import _pair_deltas, _pivot_products
from ggen.graph import Graph

ACCEPTANCE: list[tuple[int, bool, str]] = []


def all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Graph.from_edges(n, (p for i, p in enumerate(pairs) if mask >> i & 1))


def random_graphs(count, n_range, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        yield gen_erdos_renyi(n, float(rng.uniform(0.1, 0.9)), rng)


def recount_deltas(g, u):
    """``(6, n)`` recount differences from the enumeration oracle."""
    base = np.array(oracle_counts(g).as_tuple())
    out = np.zeros((6, g.n), dtype=np.int64)
    for w in range(g.n):
        if w == u:
            continue
        g.toggle_edge(u, w)
        out[:, w] = np.array(oracle_counts(g).as_tuple()) - base
        g.toggle_edge(u, w)
    return out


def compiled_deltas(g, u):
    k = g._arcs
    a, common, walks3 = _pivot_products(g._src[:k], g._dst[:k], g.n, u)
    out = np.zeros((6, g.n), dtype=np.int64)
    col = np.empty(6, dtype=np.int64)
    for w in range(g.n):
        if w != u:
            _pair_deltas(a[w], g.degrees[w], g.degrees[u], common[w], walks3[w], col)
            out[:, w] = col
    return out


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        ACCEPTANCE.append((number, bool(passed), detail))
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")

import numpy as np
import pytest
from math import comb

from ggen.baselines import gen_erdos_renyi
from ggen.counts import (
    SubgraphCounts,
    count_all,
    count_squares,
    count_stars,
    count_triangles,
    oracle_counts,
    squares_by_closed_walks,
)
from ggen.graph import (
    Graph,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    load_karate,
    path_graph,
    star_graph,
)

from conftest import all_graphs, random_graphs


def test_star_examples():
    assert count_stars(star_graph(3)) == (3, 3, 1, 0)
    assert count_stars(star_graph(4)) == (4, 6, 4, 1)


def test_triangle_examples():
    assert count_triangles(complete_graph(3)) == 1
    assert count_triangles(cycle_graph(4)) == 0


def test_square_examples():
    assert count_squares(cycle_graph(4)) == 1
    assert count_squares(complete_graph(4)) == 3


def test_oracle_examples():
    assert oracle_counts(complete_graph(3)).as_tuple() == (3, 3, 0, 0, 1, 0)
    assert oracle_counts(cycle_graph(4)).as_tuple() == (4, 4, 0, 0, 0, 1)


def test_oracle_k23_against_hand_count():
    g = complete_bipartite_graph(2, 3)
    # two centers of degree 3 and three of degree 2; squares pick 2 of the 3 leaves
    expected = (6, 2 * 3 + 3 * 1, 2 * 1, 0, 0, comb(3, 2))
    assert oracle_counts(g).as_tuple() == expected
    assert count_all(g) == oracle_counts(g)


def test_oracle_refuses_large():
    with pytest.raises(ValueError):
        oracle_counts(Graph(65))


@pytest.mark.parametrize("n", range(1, 6))
def test_exhaustive_small(n):
    for g in all_graphs(n):
        assert count_all(g) == oracle_counts(g)


def test_random_against_oracle():
    for g in random_graphs(200, (6, 12), seed=11):
        assert count_all(g) == oracle_counts(g)


@pytest.mark.parametrize("seed", range(5))
def test_seeded_examples(seed):
    g10 = gen_erdos_renyi(10, 0.5, seed)
    o = oracle_counts(g10)
    assert count_stars(g10) == (o.m, o.s, o.z, o.x)
    assert count_squares(g10) == o.q
    g12 = gen_erdos_renyi(12, 0.4, seed)
    assert count_triangles(g12) == oracle_counts(g12).t


def test_closed_walk_identity_agrees():
    for g in random_graphs(100, (2, 40), seed=4):
        assert squares_by_closed_walks(g) == count_squares(g)
    g = load_karate()
    assert squares_by_closed_walks(g) == count_squares(g) == 154


def test_degree_identities():
    for g in random_graphs(50, (2, 30), seed=8):
        c = count_all(g)
        d = g.degrees.tolist()
        assert c.s == sum(comb(k, 2) for k in d)
        assert c.z == sum(comb(k, 3) for k in d)
        assert c.x == sum(comb(k, 4) for k in d)
        assert 3 * c.t <= c.s
        assert c.m <= g.n * (g.n - 1) // 2


def test_trees_have_no_squares():
    rng = np.random.default_rng(2)
    for n in range(2, 40):
        parent = [int(rng.integers(i)) for i in range(1, n)]
        g = Graph.from_edges(n, ((i + 1, p) for i, p in enumerate(parent)))
        assert count_squares(g) == 0
    assert count_squares(path_graph(10)) == 0


def test_bipartite_has_no_triangles():
    for a, b in [(1, 1), (2, 5), (4, 4), (7, 3)]:
        assert count_triangles(complete_bipartite_graph(a, b)) == 0


def test_karate_counts():
    c = count_all(load_karate())
    assert (c.m, c.t, c.q) == (78, 45, 154)
    assert c.s == 528


def test_counts_are_python_ints_and_exact():
    g = star_graph(2000)
    c = count_all(g)
    assert type(c.x) is int
    assert c.x == comb(2000, 4)


def test_counts_type_validation():
    with pytest.raises(TypeError):
        SubgraphCounts(m=1.5)
    c = SubgraphCounts.from_mapping({"m": 3, "t": 1})
    assert c.as_dict() == {"m": 3, "s": 0, "z": 0, "x": 0, "t": 1, "q": 0}
    assert c["t"] == 1


def test_square_overflow_detected():
    from ggen.counts import _guard_int64

    big = np.array([2**31], dtype=np.int64)
    with pytest.raises(OverflowError):
        _guard_int64(big, 4)

import numpy as np
import pytest
from scipy import stats as sps

from ggen.baselines import gen_barabasi_albert, gen_erdos_renyi
from ggen.counts import SubgraphCounts, count_all
from ggen.graph import Graph, complete_bipartite_graph, complete_graph, cycle_graph, load_karate, path_graph, star_graph
from ggen.stats import (
    ConvergenceError,
    UndefinedStatistic,
    algebraic_connectivity,
    assortativity,
    clustering_coefficient,
    degree_ccdf,
    derived_stats,
    distances,
    gini_degree,
    local_clustering,
    local_clustering_distribution,
    normalized_spectrum,
    power_law_exponent,
    power_law_mle,
    spectral_norm,
)

import oracles


def test_clustering_examples():
    assert clustering_coefficient(count_all(complete_graph(3))) == 1
    assert clustering_coefficient(count_all(cycle_graph(4))) == 0
    c = count_all(complete_graph(4))
    assert (c.t, c.s) == (4, 12) and clustering_coefficient(c) == 1
    with pytest.raises(UndefinedStatistic):
        clustering_coefficient(SubgraphCounts(m=1))


def test_clustering_identity():
    for seed in range(10):
        c = count_all(gen_erdos_renyi(30, 0.3, seed))
        assert clustering_coefficient(c) * c.s == pytest.approx(3 * c.t)


def test_gini_regular_is_zero():
    assert gini_degree(cycle_graph(9)) == pytest.approx(0, abs=1e-15)
    assert gini_degree(complete_graph(6)) == pytest.approx(0, abs=1e-15)


def test_gini_against_lorenz():
    for g in (star_graph(4), load_karate(), gen_barabasi_albert(300, 2, 1)):
        assert gini_degree(g) == pytest.approx(oracles.gini_lorenz(g.degrees), abs=1e-12)
    with pytest.raises(UndefinedStatistic):
        gini_degree(Graph(4))


def test_power_law_divergence_flag():
    with pytest.raises(UndefinedStatistic):
        power_law_exponent(cycle_graph(10))
    with pytest.raises(UndefinedStatistic):
        power_law_exponent(Graph(3))


def test_power_law_synthetic():
    # exact discrete power law with exponent 2.5 above 10
    rng = np.random.default_rng(0)
    x = sps.zipf.rvs(2.5, size=6_000_000, random_state=rng)
    x = x[x >= 10][:100_000]
    assert len(x) == 100_000
    assert power_law_mle(x) == pytest.approx(2.5, abs=0.05)


def test_assortativity_examples():
    for k in (2, 3, 7):
        assert assortativity(star_graph(k)) == pytest.approx(-1)
    with pytest.raises(UndefinedStatistic):
        assortativity(complete_graph(5))
    with pytest.raises(UndefinedStatistic):
        assortativity(Graph(3))


def test_assortativity_against_oracle():
    g = gen_erdos_renyi(50, 0.1, 7)
    assert assortativity(g) == pytest.approx(oracles.assortativity_pairs(g), abs=1e-12)


def test_spectral_norm_examples():
    for n in (2, 3, 6, 10):
        assert spectral_norm(complete_graph(n)) == pytest.approx(n - 1, rel=1e-8)
    assert spectral_norm(cycle_graph(4)) == pytest.approx(2, rel=1e-8)


def test_spectral_norm_against_dense():
    g = gen_erdos_renyi(30, 0.3, 2)
    assert spectral_norm(g) == pytest.approx(oracles.spectral_norm_dense(g), rel=1e-6)
    assert spectral_norm(g) <= g.degrees.max()


def test_spectral_norm_nonconvergence():
    # top eigenvalues of a long cycle are tightly clustered near 2
    with pytest.raises(ConvergenceError) as info:
        spectral_norm(cycle_graph(2001), maxiter=1)
    assert info.value.estimate is None or info.value.estimate > 0


def test_algebraic_examples():
    assert algebraic_connectivity(path_graph(2))[0] == pytest.approx(2)
    for n in (3, 5, 9):
        value, connected = algebraic_connectivity(complete_graph(n))
        assert value == pytest.approx(n, rel=1e-8) and connected


def test_algebraic_against_dense():
    g = gen_erdos_renyi(30, 0.3, 2)
    value, connected = algebraic_connectivity(g)
    assert connected
    assert value == pytest.approx(oracles.algebraic_dense(g), rel=1e-6)


def test_algebraic_disconnected_flagged():
    g = Graph.from_edges(9, [(0, 1), (1, 2), (2, 0), (2, 3), (5, 6)])
    value, connected = algebraic_connectivity(g)
    assert not connected
    assert value == pytest.approx(oracles.algebraic_dense(g), rel=1e-6)


def test_distance_examples():
    assert distances(path_graph(5)).diameter == 4
    assert distances(complete_graph(3)).mean_distance == 1


def test_distances_karate_against_powers():
    g = load_karate()
    res = distances(g)
    diameter, mean, dist = oracles.distances_by_powers(g)
    assert res.diameter == diameter
    assert res.mean_distance == pytest.approx(mean, abs=1e-12)
    off = dist[~np.eye(len(dist), dtype=bool)]
    expected = [(off <= d).mean() for d in range(1, diameter + 1)]
    assert res.cdf.y == pytest.approx(expected, abs=1e-12)


def test_distance_cdf_shape():
    g = gen_erdos_renyi(80, 0.05, 3)
    res = distances(g)
    assert (np.diff(res.cdf.y) >= 0).all()
    assert res.cdf.y[-1] == 1
    logit = np.array(res.cdf.meta["logistic"])
    assert np.isfinite(logit).all()
    pairs = res.cdf.meta["pairs"]
    top = 1 - 1 / (2 * pairs)
    assert logit[-1] == pytest.approx(np.log(top / (1 - top)))
    assert res.diameter >= res.mean_distance >= 1


def test_distance_sampling_above_limit():
    g = gen_erdos_renyi(400, 0.02, 3)
    res = distances(g, max_exact=100, sample=50)
    assert res.sources == 50
    exact = distances(g)
    assert res.mean_distance == pytest.approx(exact.mean_distance, rel=0.1)


def test_degree_ccdf_examples():
    s = degree_ccdf(cycle_graph(6))
    assert s.pairs() == [(1.0, 1.0), (2.0, 1.0)]
    s = degree_ccdf(star_graph(4))
    assert s.y[0] == 1 and s.y[1] == pytest.approx(0.2)
    g = Graph.from_edges(5, [(0, 1), (1, 2)])
    assert degree_ccdf(g).y[0] == pytest.approx(3 / 5)
    regular3 = complete_bipartite_graph(3, 3)
    assert degree_ccdf(regular3).y.tolist() == [1.0, 1.0, 1.0]


def test_local_clustering_examples():
    assert local_clustering(complete_graph(4)).tolist() == [1.0] * 4
    values = local_clustering(star_graph(4))
    assert values[0] == 0 and np.isnan(values[1:]).all()
    assert local_clustering_distribution(star_graph(4)).meta["excluded"] == 4


def test_local_clustering_against_triples():
    g = gen_erdos_renyi(20, 0.4, 1)
    ref = oracles.local_clustering_triples(g)
    values = local_clustering(g)
    for u, c in ref.items():
        assert values[u] == pytest.approx(c, abs=1e-12)
    dist = local_clustering_distribution(g)
    assert dist.x.tolist() == pytest.approx(sorted(ref.values()))
    assert (np.diff(dist.y) > 0).all() and dist.y[-1] == 1


def test_normalized_spectrum_examples():
    s = normalized_spectrum(load_karate())
    assert s.x[-1] == pytest.approx(1)
    assert np.allclose(normalized_spectrum(cycle_graph(4)).x, [-1, 0, 0, 1], atol=1e-12)


def test_normalized_spectrum_moments():
    g = gen_erdos_renyi(30, 0.3, 4)
    lam = normalized_spectrum(g).x
    for k in (2, 3, 4, 6):
        assert (lam**k).mean() == pytest.approx(oracles.return_probabilities(g, k), abs=1e-12)


def test_normalized_spectrum_symmetry_iff_bipartite():
    for g in (complete_bipartite_graph(3, 4), cycle_graph(8), path_graph(7)):
        lam = normalized_spectrum(g).x
        assert np.allclose(lam, -lam[::-1], atol=1e-10)
    for g in (complete_graph(4), cycle_graph(7)):
        lam = normalized_spectrum(g).x
        assert not np.allclose(lam, -lam[::-1], atol=1e-6)


def test_normalized_spectrum_drops_isolated_and_caps():
    g = Graph.from_edges(6, [(0, 1), (1, 2)])
    s = normalized_spectrum(g)
    assert len(s.x) == 3 and s.meta["isolated_dropped"] == 3
    assert (np.abs(s.x) <= 1).all()
    with pytest.raises(ValueError, match="subsample"):
        normalized_spectrum(complete_graph(8), cap=5)


def test_derived_stats_karate():
    g = load_karate()
    c = count_all(g)
    d = derived_stats(g, c)
    assert d.c == pytest.approx(3 * 45 / 528)
    assert d.diameter == 5
    assert 0 <= d.G < 1 and -1 <= d.rho <= 1
    assert d.spectral_norm <= g.degrees.max()
    assert d.coverage == 1.0
    assert all(v is not None for v in d.as_dict().values())


def test_derived_stats_flags_undefined():
    g = complete_graph(5)
    d = derived_stats(g, count_all(g))
    assert d.rho is None and "rho" in d.flags
    assert d.gamma is None and "gamma" in d.flags
    g = Graph.from_edges(10, [(0, 1), (1, 2), (5, 6)])
    d = derived_stats(g, count_all(g))
    assert d.coverage == pytest.approx(0.3)
    assert "largest component" in d.flags["algebraic_connectivity"]

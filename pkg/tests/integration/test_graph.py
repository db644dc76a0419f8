import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
import damsenviet.pzf as pzf
from damsenviet.pzf.graph import neighborhood, is_connected


def edge_set(g):
    return {tuple(edge) for edge in g.edges().tolist()}


def test_gnp_trivial_sizes():
    g = pzf.sample_gnp(1, 0.5, 7)
    assert (g.n, g.m) == (1, 0)
    g = pzf.sample_gnp(5, 1.0, 7)
    assert g.m == 10
    assert edge_set(g) == {(u, v) for u in range(5) for v in range(u + 1, 5)}


def test_gnp_rejects_bad_p():
    with pytest.raises(pzf.IllegalValueException):
        pzf.sample_gnp(10, 1.5, 0)


@pytest.mark.parametrize("p", [0.05, 0.3])
def test_gnp_is_deterministic(p):
    a = pzf.sample_gnp(300, p, 12345)
    b = pzf.sample_gnp(300, p, 12345)
    assert a == b
    assert a.to_edge_list() == b.to_edge_list()
    assert a.sampler_mode == ("sparse" if p < 0.1 else "dense")


def test_gnp_edge_count_moments():
    n, p = 1000, 0.1
    counts = np.array([pzf.sample_gnp(n, p, seed).m for seed in range(40)])
    pairs = n * (n - 1) // 2
    mean, sigma = pairs * p, np.sqrt(pairs * p * (1 - p))
    assert abs(counts.mean() - mean) <= 5 * sigma / np.sqrt(len(counts))


@pytest.mark.slow
def test_gnp_pair_frequency():
    hits = 0
    seeds = 1000
    for seed in range(seeds):
        hits += 7 in pzf.sample_gnp(100, 0.3, seed).neighbors(3)
    error = np.sqrt(0.3 * 0.7 / seeds)
    assert abs(hits / seeds - 0.3) <= 5 * error


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=60),
    p=st.one_of(st.just(0.0), st.floats(min_value=0.01, max_value=1.0)),
    seed=st.integers(min_value=0, max_value=2 ** 64 - 1),
)
def test_gnp_graph_invariants(n, p, seed):
    g = pzf.sample_gnp(n, p, seed)
    assert int(g.degree.sum()) == 2 * g.m
    for u in range(n):
        row = g.neighbors(u).tolist()
        assert row == sorted(set(row))
        assert u not in row
        assert all(u in g.neighbors(v).tolist() for v in row)
    assert pzf.Graph.from_edge_list(g.to_edge_list()) == g


def test_named_graphs():
    assert edge_set(pzf.named_graph(pzf.GraphSpec("path", 3))) == {(0, 1), (1, 2)}
    assert edge_set(pzf.named_graph(pzf.GraphSpec("cycle", 4))) == {
        (0, 1),
        (1, 2),
        (2, 3),
        (0, 3),
    }
    star = pzf.named_graph(pzf.GraphSpec("star", 3))
    assert star.n == 4
    assert edge_set(star) == {(0, 1), (0, 2), (0, 3)}
    assert int(star.degree[0]) == 3
    assert pzf.named_graph(pzf.GraphSpec("complete", 6)).m == 15


def test_cycle_needs_three_vertices():
    with pytest.raises(pzf.IllegalValueException):
        pzf.GraphSpec("cycle", 2)


def test_graph_spec_json():
    spec = pzf.GraphSpec("gnp", 50, 0.2)
    assert pzf.GraphSpec.from_json(spec.to_json()) == spec
    with pytest.raises(pzf.DeserializeException):
        pzf.GraphSpec.from_json({"family": "path", "n": 3, "q": 1})


def test_neighborhood():
    path = pzf.named_graph(pzf.GraphSpec("path", 3))
    assert neighborhood(path, [1]) == {0, 2}
    assert neighborhood(path, [0, 1, 2]) == frozenset()
    assert neighborhood(path, []) == frozenset()
    cycle = pzf.named_graph(pzf.GraphSpec("cycle", 5))
    assert neighborhood(cycle, [0, 1]) == {2, 4}


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10 ** 6), data=st.data())
def test_neighborhood_is_disjoint(seed, data):
    g = pzf.sample_gnp(30, 0.2, seed)
    s = data.draw(st.sets(st.integers(min_value=0, max_value=29)))
    assert not neighborhood(g, s) & s
    assert neighborhood(g, range(g.n)) == frozenset()


def test_is_connected():
    assert is_connected(pzf.named_graph(pzf.GraphSpec("path", 5)))
    assert not is_connected(pzf.Graph.from_edges(2, []))
    assert is_connected(pzf.named_graph(pzf.GraphSpec("complete", 4)))


@pytest.mark.parametrize(
    "text",
    [
        "",
        "3\n0 1\n",
        "3 2\n0 1\n",
        "3 1\n1 0\n",
        "3 2\n1 2\n0 1\n",
        "3 1\n0 3\n",
        "3 1\n0 a\n",
    ],
)
def test_malformed_edge_lists(text):
    with pytest.raises(pzf.DeserializeException):
        pzf.Graph.from_edge_list(text)


def test_asymmetric_adjacency_rejected():
    with pytest.raises(pzf.InvariantViolationException):
        pzf.Graph(2, np.array([0, 1, 1]), np.array([1]))


def test_expansion_on_complete_graph():
    g = pzf.named_graph(pzf.GraphSpec("complete", 100))
    report = pzf.check_expansion(g, 2.0, 10, 3, d=99.0)
    assert report.min_degree == report.max_degree == 99
    assert report.degree_deviation == 0
    with pytest.raises(pzf.IllegalValueException):
        pzf.check_expansion(g, 1.0, 10, 3)


def test_expansion_singletons_see_their_degree():
    g = pzf.sample_gnp(400, 0.05, 11)
    d = 2.0 * g.m / g.n
    # n / (d omega) < 2 pins every sampled set to one vertex
    report = pzf.check_expansion(g, 400 / d, 25, 5)
    assert report.set_size_cap == 1
    for size, deviation in zip(report.neighborhood_sizes, report.set_deviations):
        assert deviation == pytest.approx(abs(size - d) / d)
    assert set(report.neighborhood_sizes) <= set(g.degree.tolist())


@pytest.mark.slow
def test_expansion_audit_on_dense_samples():
    n = 20000
    d = 20 * np.log(n)
    passing = 0
    for seed in range(20):
        g = pzf.sample_gnp(n, float(d / (n - 1)), seed)
        report = pzf.check_expansion(
            g,
            20.0,
            100,
            seed,
            d=float(d),
            degree_tolerance=float(3 * np.sqrt(np.log(n) / d)),
            set_tolerance=5 / np.sqrt(20.0),
        )
        passing += report.passed
    assert passing >= 19


def test_expansion_takes_degree_from_gnp_family():
    spec = pzf.GraphSpec("gnp", 300, 0.1)
    g = spec.build(8)
    report = pzf.check_expansion(g, 4.0, 5, 8, graph_spec=spec)
    assert spec.expected_degree == pytest.approx(29.9)
    assert report.d == pytest.approx(29.9)
    assert pzf.check_expansion(g, 4.0, 5, 8, d=25.0, graph_spec=spec).d == 25.0
    path = pzf.GraphSpec("path", 10)
    assert path.expected_degree is None
    report = pzf.check_expansion(path.build(), 2.0, 5, 8, graph_spec=path)
    assert report.d == pytest.approx(1.8)

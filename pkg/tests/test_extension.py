import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from entropometer.errors import GraphError, InconsistentGraphError
from entropometer.extension import (
    AccessibilityGraph,
    EntropyRangeResult,
    Verdict,
    assert_nondecrease,
    check_range_additivity,
    entropy_range,
    load_graph,
    product_graph,
    random_accessibility_graph,
)


def chain_with_x():
    entropies = {"u": 0.0, "v": 1.0, "w": 2.0, "x": None}
    edges = [("u", "v"), ("v", "w"), ("v", "x"), ("x", "w")]
    return AccessibilityGraph(entropies, edges)


def test_sigma_node_range():
    assert entropy_range(chain_with_x(), "v") == EntropyRangeResult(1.0, 1.0)


def test_chain_example():
    assert entropy_range(chain_with_x(), "x") == EntropyRangeResult(1.0, 2.0)


def test_entropy_decrease_is_inconsistent():
    with pytest.raises(InconsistentGraphError):
        AccessibilityGraph({"a": 1.0, "b": 0.5}, [("a", "b")])
    g = AccessibilityGraph({"a1": 0.5, "a2": 1.0}, [("a2", "a1")], validate=False)
    with pytest.raises(InconsistentGraphError, match="forbid"):
        assert_nondecrease(g, "a1", "a2")


def test_relaxed_assumption_enforced():
    with pytest.raises(GraphError, match="cannot reach"):
        AccessibilityGraph({"a": 0.0, "x": None}, [("a", "x")])
    with pytest.raises(GraphError, match="cannot be reached"):
        AccessibilityGraph({"a": 0.0, "x": None}, [("x", "a")])
    with pytest.raises(GraphError, match="unknown"):
        AccessibilityGraph({"a": 0.0}, [("a", "zz")])


def test_forbidden_verdict():
    entropies = {"u": 0.0, "v": 1.0, "w": 2.0, "q": 2.5, "z": 3.0, "x": None, "y": None}
    edges = [("u", "v"), ("v", "w"), ("w", "q"), ("v", "x"), ("x", "w"), ("q", "y"), ("y", "z")]
    g = AccessibilityGraph(entropies, edges)
    assert entropy_range(g, "y") == EntropyRangeResult(2.5, 3.0)
    assert assert_nondecrease(g, "x", "y") is Verdict.FORBIDDEN
    assert not g.reachable("y", "x")
    assert assert_nondecrease(g, "y", "x") is Verdict.UNDETERMINED


def test_overlapping_ranges_undetermined():
    g = AccessibilityGraph(
        {"a": 0.0, "b": 3.0, "x": None, "y": None}, [("a", "x"), ("x", "b"), ("a", "y"), ("y", "b")]
    )
    assert assert_nondecrease(g, "x", "y") is Verdict.UNDETERMINED


def test_cycles_count_as_paths():
    g = AccessibilityGraph({"a": 1.0, "b": 1.0, "x": None}, [("a", "x"), ("x", "a"), ("x", "b")])
    assert g.reachable("a", "a") and g.reachable("x", "x")
    assert entropy_range(g, "x") == EntropyRangeResult(1.0, 1.0)


def test_json_round_trip(tmp_path):
    g = chain_with_x()
    path = tmp_path / "g.json"
    path.write_text(json.dumps(g.to_dict()))
    loaded = load_graph(path)
    assert entropy_range(loaded, "x") == EntropyRangeResult(1.0, 2.0)
    path.write_text(json.dumps({"nodes": [{"id": 1, "S": 0}, {"id": 1, "S": 1}], "edges": []}))
    with pytest.raises(GraphError, match="duplicate"):
        load_graph(path)
    with pytest.raises(GraphError, match="not found"):
        load_graph(tmp_path / "missing.json")


graphs = st.builds(
    lambda seed, n, p: random_accessibility_graph(np.random.default_rng(seed), n, p),
    st.integers(0, 2**32),
    st.integers(2, 12),
    st.floats(0.05, 0.6),
)


@given(graphs)
def test_ranges_match_brute_force(g):
    n = len(g.nodes)
    reach = O.warshall(n, g.edges)
    S = [g.entropy(i) for i in range(n)]
    for node in g.nodes:
        r = entropy_range(g, node)
        assert (r.low, r.high) == O.brute_range(S, reach, node)


@given(graphs)
def test_verdicts_never_contradict_reachability(g):
    reach = O.warshall(len(g.nodes), g.edges)
    for a in g.nodes:
        for b in g.nodes:
            if a != b and assert_nondecrease(g, a, b) is Verdict.FORBIDDEN:
                assert not reach[b][a]


@given(graphs, st.data())
def test_ranges_monotone_under_edge_addition(g, data):
    outside = [n for n in g.nodes if not g.in_sigma(n)]
    if not outside:
        return
    node = data.draw(st.sampled_from(outside))
    before = entropy_range(g, node)
    entropies = {n: g.entropy(n) for n in g.nodes}
    # only edges that keep the node's range consistent: sources at or below its high, targets at or above its low
    sources = sorted(n for n, s in g.sigma.items() if s <= before.high)
    targets = sorted(n for n, s in g.sigma.items() if s >= before.low)
    src = data.draw(st.sampled_from(sources))
    raised = AccessibilityGraph(entropies, g.edges + [(src, node)], validate=False)
    assert entropy_range(raised, node).low >= before.low
    dst = data.draw(st.sampled_from(targets))
    lowered = AccessibilityGraph(entropies, g.edges + [(node, dst)], validate=False)
    assert entropy_range(lowered, node).high <= before.high


def test_product_of_sigma_nodes():
    g = chain_with_x()
    v = check_range_additivity(g, g, "u", "w")
    assert v.holds
    assert v.product_range == EntropyRangeResult(2.0, 2.0)


def test_squared_chain_example():
    g = chain_with_x()
    gp = product_graph(g, g)
    v = check_range_additivity(g, g, "x", "x", gp)
    assert v.holds
    assert v.bound == EntropyRangeResult(2.0, 4.0)
    # enumerate the definition directly on the product
    nodes = gp.nodes
    index = {n: i for i, n in enumerate(nodes)}
    reach = O.warshall(len(nodes), [(index[a], index[b]) for a, b in gp.edges])
    S = [gp.entropy(n) for n in nodes]
    assert (v.product_range.low, v.product_range.high) == O.brute_range(S, reach, index[("x", "x")])
    for a in g.nodes:
        for b in g.nodes:
            assert check_range_additivity(g, g, a, b, gp).holds


@given(st.integers(0, 2**32))
def test_containment_on_random_products(seed):
    rng = np.random.default_rng(seed)
    ga = random_accessibility_graph(rng, int(rng.integers(2, 9)), float(rng.uniform(0.1, 0.5)))
    gb = random_accessibility_graph(rng, int(rng.integers(2, 9)), float(rng.uniform(0.1, 0.5)))
    gp = product_graph(ga, gb)
    for a in ga.nodes:
        for b in gb.nodes:
            assert check_range_additivity(ga, gb, a, b, gp).holds


def test_random_graphs_are_valid():
    rng = np.random.default_rng(0)
    for _ in range(50):
        g = random_accessibility_graph(rng, int(rng.integers(2, 13)))
        g.validate()
    with pytest.raises(GraphError):
        random_accessibility_graph(rng, 1)

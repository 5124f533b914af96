import random

import pytest
from hypothesis import given, strategies as st

from blockgraph import CycleError, GraphBuilder
from blockgraph.analyses import format_user_data, longest_weighted_path, parse_user_data
from blockgraph.errors import WeightParseError
from modelgen import random_dag, weighted
from oracles import heaviest_paths


def test_single_block():
    b = GraphBuilder()
    b.add_node("only", "Gain", {"UserData": "wcet=5"})
    res = longest_weighted_path(b.build(), "wcet", 0)
    assert (res.total_weight, res.path) == (5.0, (0,))


def test_diamond_fixture(load_graph):
    _, g = load_graph("diamond")
    res = longest_weighted_path(g, "wcet", 0)
    assert res.total_weight == 9
    assert [g.nodes[v].name for v in res.path] == ["A", "C", "D"]
    best, arg = heaviest_paths(g, [1, 2, 7, 1])
    assert best == 9 and res.path in arg


def test_default_weight_and_empty_graph(load_graph):
    _, g = load_graph("seven_paths")
    res = longest_weighted_path(g, "wcet", 1)
    assert res.total_weight == 6  # In1 A B1 D E Out1, every block weighs 1
    assert longest_weighted_path(GraphBuilder().build()).path == ()


def test_cycle_rejected(load_graph):
    _, g = load_graph("feedback")
    with pytest.raises(CycleError):
        longest_weighted_path(g)


@pytest.mark.parametrize("data", ["wcet", "wcet=abc", "wcet=-1", "wcet=1;wcet=2", "=3", "wcet=inf", "wcet=nan"])
def test_malformed_user_data_names_block(data):
    b = GraphBuilder()
    b.add_node("bad", "Gain", {"UserData": data})
    with pytest.raises(WeightParseError) as info:
        longest_weighted_path(b.build())
    assert info.value.block == "bad"


def test_other_keys_may_be_anything():
    b = GraphBuilder()
    b.add_node("x", "Gain", {"UserData": "note=hello world; wcet=2.5 ;"})
    assert longest_weighted_path(b.build()).total_weight == 2.5


def test_random_dags_match_oracle():
    rng = random.Random(33)
    for _ in range(200):
        g, w = weighted(random_dag(rng, rng.randint(1, 10), 0.35), rng)
        res = longest_weighted_path(g, "wcet", 0)
        best, arg = heaviest_paths(g, w)
        assert res.total_weight == best
        assert res.path in arg


def test_scaling_weights():
    rng = random.Random(34)
    for _ in range(50):
        base = random_dag(rng, rng.randint(1, 9), 0.4)
        g, w = weighted(base, rng)
        c = rng.choice([2, 3, 4])
        b = GraphBuilder()
        for n, wn in zip(g.nodes, w):
            b.add_node(n.name, n.block_type, {"UserData": f"wcet={wn * c}"})
        for e in g.edges:
            b.add_edge(e.src, e.src_port, e.dst, e.dst_port)
        scaled = b.build()
        r1, r2 = longest_weighted_path(g), longest_weighted_path(scaled)
        assert r2.total_weight == c * r1.total_weight
        assert heaviest_paths(scaled, [c * x for x in w])[1] == heaviest_paths(g, w)[1]


_keys = st.text(st.characters(blacklist_characters=";=", blacklist_categories=("Cs",)), min_size=1).map(str.strip).filter(bool)
_values = st.text(st.characters(blacklist_characters=";", blacklist_categories=("Cs",))).map(str.strip)


@given(st.dictionaries(_keys, _values, max_size=6))
def test_user_data_round_trip(data):
    assert parse_user_data(format_user_data(data)) == data


def test_user_data_examples():
    assert parse_user_data("k=v;k2=v2") == {"k": "v", "k2": "v2"}
    assert format_user_data({"k": "v", "k2": "v2"}) == "k=v;k2=v2"
    assert parse_user_data("") == {}
    with pytest.raises(ValueError):
        format_user_data({"a;b": "1"})

import random

import pytest

from blockgraph import (
    CycleError,
    GraphBuilder,
    InconsistentGraph,
    InvalidModel,
    Model,
    ModelGraph,
    Order,
    PortRef,
    RawConnection,
    System,
    Visitor,
    build_graph,
    inventory,
    is_acyclic,
    load,
    make_block,
    make_subsystem,
    parse,
    run_visitor,
    serialize,
    to_model,
    topological_order,
)
from blockgraph.graph import Edge
from conftest import all_fixtures
from modelgen import random_dag, random_model, random_multigraph


def model_of(blocks, conns):
    return Model("m", System(tuple(blocks), tuple(conns)))


def line(src, *dsts):
    return RawConnection(PortRef(*src) if isinstance(src, tuple) else PortRef(src), tuple(PortRef(d) for d in dsts))


def test_chain_has_two_nodes_one_edge():
    g = build_graph(model_of([make_block("A", "Constant"), make_block("B", "Gain")], [line("A", "B")]))
    assert (len(g.nodes), len(g.edges)) == (2, 1)


def test_branched_line_becomes_two_edges():
    blocks = [make_block("A", "Constant"), make_block("B", "Gain"), make_block("C", "Gain")]
    g = build_graph(model_of(blocks, [line("A", "B", "C")]))
    assert (len(g.nodes), len(g.edges)) == (3, 2)
    assert g.edges[0].line == g.edges[1].line


def test_invalid_model_is_rejected():
    with pytest.raises(InvalidModel):
        build_graph(model_of([make_block("A", "Gain")], [line("A", "X")]))


def _count_model(system):
    nodes = len(system.blocks)
    edges = sum(len(c.dsts) for c in system.connections)
    levels = 1
    for b in system.blocks:
        if hasattr(b, "system"):
            n, e, s = _count_model(b.system)
            nodes, edges, levels = nodes + n, edges + e, levels + s
    return nodes, edges, levels


def _count_graph(g):
    nodes, edges, levels = len(g.nodes), len(g.edges), 1
    for n in g.nodes:
        if n.subgraph is not None:
            a, b, c = _count_graph(n.subgraph)
            nodes, edges, levels = nodes + a, edges + b, levels + c
    return nodes, edges, levels


def test_counts_match_the_model():
    rng = random.Random(3)
    for _ in range(100):
        m = random_model(rng)
        assert _count_graph(build_graph(m)) == _count_model(m.root)


def test_multi_edges_are_independent():
    blocks = [make_block("A", "Constant"), make_block("B", "Sum")]
    g = build_graph(model_of(blocks, [line("A", "B"), RawConnection(PortRef("A"), (PortRef("B", 2),))]))
    assert [e.index for _, e in g.successors(0)] == [0, 1]
    assert [n for n, _ in g.predecessors(1)] == [0, 0]


def test_diamond_adjacency():
    blocks = [make_block(x, "Gain") for x in "AB"] + [make_block("C", "Gain"), make_block("D", "Sum")]
    conns = [line("A", "B", "C"), line("B", "D"), RawConnection(PortRef("C"), (PortRef("D", 2),))]
    g = build_graph(model_of(blocks, conns))
    assert [g.nodes[n].name for n, _ in g.predecessors(3)] == ["B", "C"]
    assert g.successors(3) == [] and g.predecessors(0) == []


def test_adjacency_agrees_with_edge_scan():
    rng = random.Random(4)
    for _ in range(100):
        g = random_multigraph(rng, rng.randint(1, 10), rng.randint(0, 25))
        for v in range(len(g)):
            assert g.successors(v) == [(e.dst, e) for e in g.edges if e.src == v]
            assert g.predecessors(v) == [(e.src, e) for e in g.edges if e.dst == v]
        assert sum(len(g.successors(v)) for v in range(len(g))) == len(g.edges)
        assert sum(len(g.predecessors(v)) for v in range(len(g))) == len(g.edges)
        g.check()


def test_out_of_range_node():
    g = random_multigraph(random.Random(0), 3, 2)
    with pytest.raises(IndexError):
        g.successors(3)
    with pytest.raises(IndexError):
        g.predecessors(-1)


def test_inconsistent_graph_detected():
    g = random_multigraph(random.Random(0), 3, 2)
    broken = ModelGraph(g.nodes, (Edge(0, 0, 1, 7, 1, 0, {}),))
    with pytest.raises(InconsistentGraph):
        broken.check()
    object.__setattr__(g, "out_edges", ((),) * 3)
    with pytest.raises(InconsistentGraph):
        to_model(g, Model("m", System()))


def test_to_model_regroups_shared_source():
    blocks = [make_block("A", "Constant"), make_block("B", "Gain"), make_block("C", "Gain")]
    m = model_of(blocks, [line("A", "B", "C")])
    back = to_model(build_graph(m), m)
    text = serialize(back)
    assert text.count("Line {") == 1 and text.count("Branch {") == 1
    assert len(to_model(build_graph(m), m, regroup=False).root.connections) == 2


def test_to_model_is_fixed_point_for_plain_lines():
    for path in all_fixtures():
        m = load(path)
        assert serialize(to_model(build_graph(m), m)) == serialize(m)


def test_graph_round_trip():
    rng = random.Random(8)
    for _ in range(100):
        m = random_model(rng)
        g = build_graph(m)
        assert build_graph(to_model(g, m)) == g
        assert build_graph(parse(serialize(to_model(g, m)))) == g


def test_find_and_paths():
    m = load(all_fixtures()[0].parent / "hierarchy.bdm")
    g = build_graph(m)
    sub, i = g.find("scale/g")
    assert sub.path(i) == "scale/g"
    assert sub.nodes[i].block_type == "Gain"
    with pytest.raises(KeyError):
        g.find("c/x")
    nodes, edges = inventory(g)
    assert nodes["hold/z", "UnitDelay"] == 1
    assert edges["scale/in", 1, "scale/g", 1] == 1


def test_topological_order_respects_edges():
    rng = random.Random(9)
    for _ in range(100):
        g = random_dag(rng, rng.randint(1, 12), 0.3)
        pos = {v: i for i, v in enumerate(topological_order(g))}
        assert sorted(pos) == list(range(len(g)))
        assert all(pos[e.src] < pos[e.dst] for e in g.edges)
        assert is_acyclic(g)


def test_topological_order_rejects_cycles():
    b = GraphBuilder()
    b.add_node("a", "Gain")
    b.add_node("b", "Gain")
    b.add_edge(0, 1, 1, 1)
    b.add_edge(1, 1, 0, 1)
    g = b.build()
    assert not is_acyclic(g)
    with pytest.raises(CycleError):
        topological_order(g)


def test_builder_names():
    b = GraphBuilder()
    b.add_node("x", "Gain")
    assert b.unique_name("x") == "x_1"
    assert b.unique_name("x", {"x_1"}) == "x_2"
    assert b.unique_name("y") == "y"
    with pytest.raises(ValueError):
        b.add_node("x", "Gain")


# -- visitor -------------------------------------------------------------------


class KindCounter(Visitor):
    def __init__(self, descend=True):
        self.calls = []
        self._descend = descend

    def visit_block(self, node, graph):
        self.calls.append(("block", graph.path(node.index)))
        return 1

    def visit_subsystem(self, node, graph):
        self.calls.append(("subsystem", graph.path(node.index)))
        return 0

    def descend(self, node, graph):
        return self._descend

    def initial(self):
        return 0

    def fold(self, acc, result):
        return acc + result


def test_counting_visitor_on_flat_model():
    blocks = [make_block(f"b{i}", "Gain") for i in range(5)]
    v = KindCounter()
    assert v.run(build_graph(model_of(blocks, []))) == 5
    assert len(v.calls) == 5


def test_dispatch_two_subsystems_three_blocks():
    inner = System((make_block("in", "Inport"), make_block("out", "Outport")), (line("in", "out"),))
    blocks = [make_block("a", "Constant"), make_subsystem("s1", inner), make_subsystem("s2", inner),
              make_block("b", "Gain"), make_block("t", "Terminator")]
    g = build_graph(model_of(blocks, []))
    v = KindCounter(descend=False)
    v.run(g)
    kinds = [k for k, _ in v.calls]
    assert kinds.count("subsystem") == 2 and kinds.count("block") == 3
    v = KindCounter(descend=True)
    v.run(g)
    assert [k for k, _ in v.calls].count("block") == 7
    assert len({p for _, p in v.calls}) == len(v.calls)


def test_default_callbacks_are_neutral():
    g = build_graph(load(all_fixtures()[0].parent / "hierarchy.bdm"))
    assert Visitor().run(g) == [None] * len(g)


def test_bfs_order_and_start():
    g = build_graph(load(all_fixtures()[0].parent / "seven_paths.bdm"))
    order = []

    class Rec(Visitor):
        def visit_block(self, node, graph):
            order.append(node.name)

    Rec().run(g, Order.BFS, start=g.name_index["A"])
    assert order[:4] == ["A", "B1", "B2", "B3"]
    assert "K" not in order and "In1" not in order
    with pytest.raises(ValueError):
        run_visitor(Rec(), g, Order.BFS)


def test_topological_visitor_on_cyclic_level():
    g = build_graph(load(all_fixtures()[0].parent / "feedback.bdm"))
    with pytest.raises(CycleError):
        run_visitor(Visitor(), g, Order.TOPOLOGICAL)

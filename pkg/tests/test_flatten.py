import random
import warnings
from collections import Counter

import pytest

from blockgraph import (
    Model,
    PortRef,
    RawConnection,
    System,
    build_graph,
    evaluate,
    make_block,
    make_subsystem,
    parse,
    serialize,
    to_model,
    validate,
)
from blockgraph.errors import PortMismatch
from blockgraph.graph import GraphBuilder, inventory
from blockgraph.transforms import SemanticsWarning, flatten_hierarchy, replay
from modelgen import random_evaluable_model, random_model
from oracles import contracted_reachability


def conn(src, dst, sp=1, dp=1):
    return RawConnection(PortRef(src, sp), (PortRef(dst, dp),))


def wrapped_gain(virtual=True):
    inner = System(
        (make_block("in", "Inport"), make_block("g", "Gain", {"Gain": "4"}), make_block("out", "Outport")),
        (conn("in", "g"), conn("g", "out")),
    )
    blocks = (make_block("c", "Constant", {"Value": "2"}), make_subsystem("sub", inner, virtual=virtual),
              make_block("y", "Outport"))
    return Model("m", System(blocks, (conn("c", "sub"), conn("sub", "y"))))


def test_flat_model_unchanged(load_graph):
    _, g = load_graph("seven_paths")
    out, log = flatten_hierarchy(g)
    assert out == g and len(log) == 0


def test_wrapped_gain_becomes_chain():
    g = build_graph(wrapped_gain())
    out, log = flatten_hierarchy(g)
    assert [(n.name, n.block_type) for n in out.nodes] == [("c", "Constant"), ("sub.g", "Gain"), ("y", "Outport")]
    assert [(out.nodes[e.src].name, out.nodes[e.dst].name) for e in out.edges] == [("c", "sub.g"), ("sub.g", "y")]
    assert evaluate(out, {}, 3).values == evaluate(g, {}, 3).values == {"y": [8.0] * 3}
    assert replay(g, log) == inventory(out)


def test_atomic_kept_unless_requested():
    g = build_graph(wrapped_gain(virtual=False))
    out, log = flatten_hierarchy(g)
    assert out == g and len(log) == 0
    with pytest.warns(SemanticsWarning):
        out, _ = flatten_hierarchy(g, include_atomic=True)
    assert not any(n.is_subsystem for n in out.nodes)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        flatten_hierarchy(g, include_atomic=True, warn=False)


def test_name_collisions_get_suffix():
    m = wrapped_gain()
    blocks = m.root.blocks + (make_block("sub.g", "Terminator"),)
    g = build_graph(Model("m", System(blocks, m.root.connections)))
    out, _ = flatten_hierarchy(g)
    names = [n.name for n in out.nodes]
    assert "sub.g" in names and "sub.g_1" in names
    assert len(set(names)) == len(names)


def test_port_mismatch():
    g = build_graph(wrapped_gain())
    b = GraphBuilder()
    for n in g.nodes:
        b.copy_node(n)
    b.nodes[1] = b.nodes[1].__class__(*[getattr(b.nodes[1], f) for f in ("index", "name", "block_type", "parameters")],
                                      2, 1, True, b.nodes[1].subgraph)
    for e in g.edges:
        b.add_edge(e.src, e.src_port, e.dst, e.dst_port)
    b.add_edge(0, 1, 1, 2)
    with pytest.raises(PortMismatch):
        flatten_hierarchy(b.build())


def test_unconnected_and_passthrough_ports():
    inner = System(
        (make_block("a", "Inport"), make_block("b", "Inport"), make_block("o1", "Outport"), make_block("o2", "Outport")),
        (conn("a", "o1"),),
    )
    blocks = (make_block("c", "Constant"), make_subsystem("s", inner), make_block("t1", "Terminator"),
              make_block("t2", "Terminator"))
    conns = (RawConnection(PortRef("c"), (PortRef("s", 1), PortRef("s", 2))), conn("s", "t1", 1), conn("s", "t2", 2))
    g = build_graph(Model("m", System(blocks, conns)))
    out, log = flatten_hierarchy(g)
    assert [n.name for n in out.nodes] == ["c", "t1", "t2"]
    assert [(out.nodes[e.src].name, out.nodes[e.dst].name) for e in out.edges] == [("c", "t1")]
    assert evaluate(out, {}, 2).values == evaluate(g, {}, 2).values
    assert replay(g, log) == inventory(out)


def _subsystem_count(g, virtual_only):
    return sum(1 for _, n in g.walk() if n.is_subsystem and (n.virtual or not virtual_only))


def _check_flatten(g, include_atomic):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SemanticsWarning)
        out, log = flatten_hierarchy(g, include_atomic=include_atomic)
    assert _subsystem_count(out, virtual_only=not include_atomic) == 0
    blocks, reach = contracted_reachability(g)
    blocks2, reach2 = contracted_reachability(out)
    assert blocks2 == blocks
    assert reach2 == reach
    before = Counter(t for _, n in g.walk() for t in [n.block_type])
    after = Counter(t for _, n in out.walk() for t in [n.block_type])
    assert replay(g, log) == inventory(out)
    return out, before, after


def test_random_models_reachability():
    rng = random.Random(61)
    for _ in range(100):
        m = random_model(rng, 30, 3)
        g = build_graph(m)
        for include_atomic in (False, True):
            out, _, _ = _check_flatten(g, include_atomic)
            assert validate(to_model(out, m)) == []
            again = parse(serialize(to_model(out, m)))
            assert build_graph(again) == build_graph(to_model(out, m))


def test_random_evaluable_hierarchies():
    rng = random.Random(62)
    for _ in range(60):
        m, inputs = random_evaluable_model(rng, 20, 3)
        g = build_graph(m)
        ref = evaluate(g, inputs, 8).values
        for include_atomic in (False, True):
            out, before, after = _check_flatten(g, include_atomic)
            assert evaluate(out, inputs, 8).values == ref
            if include_atomic:
                kept = {t: k for t, k in before.items() if t not in ("SubSystem", "Inport", "Outport")}
                assert {t: k for t, k in after.items() if t not in ("Inport", "Outport")} == kept


def test_input_not_modified():
    rng = random.Random(63)
    for _ in range(20):
        m = random_model(rng)
        g = build_graph(m)
        flatten_hierarchy(g, include_atomic=True, warn=False)
        assert g == build_graph(m)

import random
from itertools import combinations

import pytest

from blockgraph import GraphBuilder, Model, PortRef, RawConnection, System, build_graph, make_block, make_subsystem
from blockgraph.analyses import detect_clones, find_clones
from modelgen import planted_clone_graph, random_multigraph
from oracles import CloneOracle


def check_groups(g, groups, min_size=2, match_parameters=False):
    """Every group must pass the exhaustive oracle; returns the oracle."""
    o = CloneOracle(g, match_parameters)
    for grp in groups:
        assert grp.size >= min_size
        assert len(grp.instances) >= 2
        for inst in grp.instances:
            assert len(inst) == grp.size == len(set(inst))
            assert o.connected(inst)
        for a, b in combinations(grp.instances, 2):
            assert not set(a) & set(b)
            assert o.isomorphic(a, b)
            assert not o.extendable(a, b)
    return o


def test_distinct_types_have_no_clones():
    b = GraphBuilder()
    for i, t in enumerate(["Gain", "Sum", "Constant", "Product"]):
        b.add_node(f"n{i}", t)
    for i in range(3):
        b.add_edge(i, 1, i + 1, 1)
    assert detect_clones(b.build(), 2) == []


def test_chain_twice(load_graph):
    _, g = load_graph("clones")
    (grp,) = detect_clones(g, 2)
    assert grp.size == 3
    assert grp.names == (("c1", "g1", "s1"), ("c2", "g2", "s2"))
    assert grp.signature.startswith("3:")
    check_groups(g, [grp])
    assert detect_clones(g, 4) == []


def test_port_indices_matter():
    b = GraphBuilder()
    for name in ("a", "b", "c", "d"):
        b.add_node(name, "Gain" if name in "ac" else "Sum", in_ports=2)
    b.add_edge(0, 1, 1, 1)
    b.add_edge(2, 1, 3, 2)
    assert find_clones(b.build()) == []


def test_parameters_opt_in():
    def chain(k):
        return [make_block(f"c{k}", "Constant", {"Value": str(k)}), make_block(f"g{k}", "Gain")]

    blocks = chain(1) + chain(2)
    conns = [RawConnection(PortRef("c1"), (PortRef("g1"),)), RawConnection(PortRef("c2"), (PortRef("g2"),))]
    g = build_graph(Model("m", System(tuple(blocks), tuple(conns))))
    assert len(detect_clones(g)) == 1
    assert detect_clones(g, match_parameters=True) == []


def test_subsystems_are_flattened_first():
    def wrapped(name):
        inner = System(
            (make_block("i", "Inport"), make_block("g", "Gain"), make_block("u", "UnitDelay"), make_block("o", "Outport")),
            (
                RawConnection(PortRef("i"), (PortRef("g"),)),
                RawConnection(PortRef("g"), (PortRef("u"),)),
                RawConnection(PortRef("u"), (PortRef("o"),)),
            ),
        )
        return make_subsystem(name, inner, virtual=name == "s1")

    blocks = (make_block("c", "Constant"), wrapped("s1"), wrapped("s2"), make_block("t", "Terminator"))
    conns = (RawConnection(PortRef("c"), (PortRef("s1"),)), RawConnection(PortRef("s1"), (PortRef("s2"),)),
             RawConnection(PortRef("s2"), (PortRef("t"),)))
    g = build_graph(Model("m", System(blocks, conns)))
    groups = detect_clones(g)
    assert groups[0].size == 2
    assert set(groups[0].names) == {("s1.g", "s1.u"), ("s2.g", "s2.u")}


def test_min_size_validated():
    with pytest.raises(ValueError):
        detect_clones(GraphBuilder().build(), 1)


def test_random_graphs_against_oracle():
    rng = random.Random(41)
    for _ in range(60):
        g = random_multigraph(rng, rng.randint(2, 9), rng.randint(1, 14), ("Gain", "Sum", "UnitDelay"), False)
        groups = find_clones(g, 2)
        o = check_groups(g, groups)
        assert max((grp.size for grp in groups), default=0) == o.largest_clone()


def test_planted_size_four_found():
    rng = random.Random(42)
    for _ in range(40):
        g, a, b = planted_clone_graph(rng, 10, 4)
        groups = detect_clones(g)
        check_groups(g, groups)
        assert any(
            set(a) <= set(x) and set(b) <= set(y) for grp in groups for x in grp.instances for y in grp.instances
        )


def test_budget_fallback_still_sound():
    rng = random.Random(43)
    g, a, b = planted_clone_graph(rng, 12, 5, ("Gain",), extra=0.4)
    groups = find_clones(g, 2, budget=20)
    check_groups_sound = CloneOracle(g)
    for grp in groups:
        for x, y in combinations(grp.instances, 2):
            assert not set(x) & set(y)
            assert check_groups_sound.isomorphic(x, y)


def test_signature_is_isomorphism_invariant():
    rng = random.Random(44)
    for _ in range(30):
        g, a, b = planted_clone_graph(rng, 10, 4)
        for grp in find_clones(g):
            sigs = {find_clones_signature(g, inst) for inst in grp.instances}
            assert sigs == {grp.signature}


def find_clones_signature(g, inst):
    from blockgraph.analyses.clones import _Matcher, _signature

    return _signature(_Matcher(g, False), tuple(inst))

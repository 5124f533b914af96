"""Inline subsystems into their parent level."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Hashable

from blockgraph.errors import PortMismatch
from blockgraph.graph import GraphBuilder, ModelGraph, Node, inventory, with_prefix
from blockgraph.model import port_numbers
from blockgraph.transforms.changelog import ChangeLog


class SemanticsWarning(UserWarning):
    """Flattening an atomic subsystem may change execution order semantics."""


def _join(prefix: str, name: str) -> str:
    return f"{prefix}/{name}" if prefix else name


def _ports(sub: ModelGraph, kind: str) -> list[int]:
    found = [n for n in sub.nodes if n.block_type == kind]
    return [n.index for _, n in sorted(zip(port_numbers(found), found), key=lambda t: t[0])]


@dataclass
class _WorkEdge:
    src: Hashable
    src_port: int
    dst: Hashable
    dst_port: int
    line: Hashable
    parameters: dict
    original: bool = False


@dataclass
class _Level:
    """Scratch state while inlining the subsystems of one level."""

    graph: ModelGraph
    names: dict[Hashable, str] = field(default_factory=dict)
    kinds: dict[Hashable, Node] = field(default_factory=dict)
    edges: list = field(default_factory=list)


def flatten_hierarchy(
    graph: ModelGraph, include_atomic: bool = False, warn: bool = True
) -> tuple[ModelGraph, ChangeLog]:
    """Inline every virtual subsystem (and atomic ones with ``include_atomic``).

    Each Inport is bypassed by joining its external drivers to its internal
    consumers; each Outport by joining its internal driver to its external
    consumers. Port blocks and the subsystem shell disappear, the remaining
    blocks move up one level under the name ``"<subsystem>.<block>"`` (with a
    ``_<k>`` suffix on collisions). Nested levels are flattened bottom-up.
    Raises :class:`PortMismatch` when a subsystem's port count disagrees with
    its Inport/Outport blocks.
    """
    log = ChangeLog()
    return _flatten(graph, include_atomic, warn, log), log


def _flatten(graph: ModelGraph, include_atomic: bool, warn: bool, log: ChangeLog) -> ModelGraph:
    inner: dict[int, ModelGraph] = {}
    for n in graph.nodes:
        if n.subgraph is not None:
            inner[n.index] = _flatten(n.subgraph, include_atomic, warn, log)
    targets = {i for i in inner if graph.nodes[i].virtual or include_atomic}
    if not targets:
        if not inner:
            return graph
        nodes = tuple(
            n if n.index not in inner else Node(
                n.index, n.name, n.block_type, n.parameters, n.in_ports, n.out_ports, n.virtual, inner[n.index]
            )
            for n in graph.nodes
        )
        return ModelGraph(nodes, graph.edges, graph.prefix, graph.parameters)

    b = GraphBuilder(graph.prefix, graph.parameters)
    taken = {n.name for n in graph.nodes if n.index not in targets}
    key_of: dict[Hashable, int] = {}
    port_keys: list[tuple[Hashable, str]] = []
    in_port_key: dict[tuple[int, int], Hashable] = {}
    out_port_key: dict[tuple[int, int], Hashable] = {}

    for n in graph.nodes:
        if n.index not in targets:
            key_of[("keep", n.index)] = b.copy_node(n, subgraph=inner.get(n.index))
            continue
        sub = inner[n.index]
        ins, outs = _ports(sub, "Inport"), _ports(sub, "Outport")
        if (len(ins), len(outs)) != (n.in_ports, n.out_ports):
            raise PortMismatch(
                f"subsystem {graph.path(n.index)!r} declares {n.in_ports}/{n.out_ports} ports "
                f"but contains {len(ins)} Inports/{len(outs)} Outports"
            )
        if not n.virtual and warn:
            warnings.warn(f"flattening atomic subsystem {graph.path(n.index)!r}", SemanticsWarning, stacklevel=3)
        log.block(False, graph.path(n.index), n.block_type)
        for k, i in enumerate(ins, start=1):
            in_port_key[n.index, k] = ("in", n.index, i)
        for k, i in enumerate(outs, start=1):
            out_port_key[n.index, k] = ("in", n.index, i)
        for m in sub.nodes:
            key = ("in", n.index, m.index)
            log.block(False, sub.path(m.index), m.block_type)
            if m.block_type in ("Inport", "Outport"):
                port_keys.append((key, m.block_type))
                continue
            name = b.unique_name(f"{n.name}.{m.name}", taken)
            taken.add(name)
            child = None
            if m.subgraph is not None:
                child = with_prefix(m.subgraph, _join(graph.prefix, name))
                _log_move(log, m.subgraph, child)
            key_of[key] = b.copy_node(m, name=name, subgraph=child)
            log.block(True, _join(graph.prefix, name), m.block_type)
        for e in sub.edges:
            log.edge(False, (sub.path(e.src), e.src_port, sub.path(e.dst), e.dst_port))

    work: list[_WorkEdge] = []
    for e in graph.edges:
        src: Hashable = ("keep", e.src)
        dst: Hashable = ("keep", e.dst)
        sp, dp = e.src_port, e.dst_port
        touched = e.src in targets or e.dst in targets
        if touched:
            log.edge(False, (graph.path(e.src), e.src_port, graph.path(e.dst), e.dst_port))
        if e.src in targets:
            src, sp = _port_key(out_port_key, e.src, e.src_port, graph), 1
        if e.dst in targets:
            dst, dp = _port_key(in_port_key, e.dst, e.dst_port, graph), 1
        work.append(_WorkEdge(src, sp, dst, dp, ("outer", e.line), e.parameters, original=not touched))
    for s in sorted(targets):
        for e in inner[s].edges:
            work.append(
                _WorkEdge(("in", s, e.src), e.src_port, ("in", s, e.dst), e.dst_port, ("inner", s, e.line), e.parameters)
            )

    for key, kind in port_keys:
        # A wire loop that closes through port blocks only carries no block; drop it.
        ins = [w for w in work if w.dst == key and w.src != key]
        outs = [w for w in work if w.src == key and w.dst != key]
        work = [w for w in work if w.dst != key and w.src != key]
        for i in ins:
            for o in outs:
                carrier = i if kind == "Inport" else o
                work.append(_WorkEdge(i.src, i.src_port, o.dst, o.dst_port, carrier.line, carrier.parameters))

    for w in work:
        s, d = key_of[w.src], key_of[w.dst]
        b.add_edge(s, w.src_port, d, w.dst_port, w.line, w.parameters)
        if not w.original:
            log.edge(True, (_join(graph.prefix, b.nodes[s].name), w.src_port, _join(graph.prefix, b.nodes[d].name), w.dst_port))
    return b.build()


def _port_key(table: dict, node: int, port: int, graph: ModelGraph) -> Hashable:
    try:
        return table[node, port]
    except KeyError:
        raise PortMismatch(f"edge uses port {port} of {graph.path(node)!r}, which has no port block") from None


def _log_move(log: ChangeLog, old: ModelGraph, new: ModelGraph) -> None:
    """Log a nested level whose hierarchical names change because its owner moved."""
    old_nodes, old_edges = inventory(old)
    new_nodes, new_edges = inventory(new)
    for (path, kind), k in old_nodes.items():
        for _ in range(k):
            log.block(False, path, kind)
    for (path, kind), k in new_nodes.items():
        for _ in range(k):
            log.block(True, path, kind)
    for edge, k in old_edges.items():
        for _ in range(k):
            log.edge(False, edge)
    for edge, k in new_edges.items():
        for _ in range(k):
            log.edge(True, edge)

"""Index-based directed multigraph built from a :class:`Model`.

Every block becomes a node, every (source, destination) pair of a line becomes
an independent edge; two edges may join the same pair of ports. Edges that
came from one branched line share a ``line`` id, which is how
:func:`to_model` regroups them. Subsystems keep their contents in a nested
:class:`ModelGraph` attached to the subsystem node.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from blockgraph.errors import CycleError, InconsistentGraph, InvalidModel
from blockgraph.model import (
    Model,
    PortRef,
    RawConnection,
    SimpleBlock,
    Subsystem,
    System,
    validate,
)


@dataclass(frozen=True)
class Node:
    index: int
    name: str
    block_type: str
    parameters: dict[str, str]
    in_ports: int
    out_ports: int
    virtual: bool = True
    subgraph: "ModelGraph | None" = None

    @property
    def is_subsystem(self) -> bool:
        return self.subgraph is not None


@dataclass(frozen=True)
class Edge:
    index: int
    src: int
    src_port: int
    dst: int
    dst_port: int
    line: int
    parameters: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ModelGraph:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    prefix: str = ""
    parameters: dict[str, str] = field(default_factory=dict)
    out_edges: tuple[tuple[int, ...], ...] = field(init=False, compare=False, repr=False)
    in_edges: tuple[tuple[int, ...], ...] = field(init=False, compare=False, repr=False)
    name_index: dict[str, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        outs: list[list[int]] = [[] for _ in self.nodes]
        ins: list[list[int]] = [[] for _ in self.nodes]
        n = len(self.nodes)
        for e in self.edges:
            if 0 <= e.src < n and 0 <= e.dst < n:  # check() reports the rest
                outs[e.src].append(e.index)
                ins[e.dst].append(e.index)
        object.__setattr__(self, "out_edges", tuple(map(tuple, outs)))
        object.__setattr__(self, "in_edges", tuple(map(tuple, ins)))
        object.__setattr__(self, "name_index", {n.name: n.index for n in self.nodes})

    def __len__(self) -> int:
        return len(self.nodes)

    def path(self, node: int) -> str:
        """Hierarchical name of ``node``, e.g. ``"sub/blk"``."""
        name = self.nodes[node].name
        return f"{self.prefix}/{name}" if self.prefix else name

    def node(self, name: str) -> Node:
        return self.nodes[self.name_index[name]]

    def find(self, path: str) -> tuple["ModelGraph", int]:
        """Resolve a ``/``-separated name relative to this level."""
        graph = self
        parts = path.split("/")
        for part in parts[:-1]:
            sub = graph.nodes[graph.name_index[part]].subgraph
            if sub is None:
                raise KeyError(path)
            graph = sub
        return graph, graph.name_index[parts[-1]]

    def out_degree(self, node: int) -> int:
        return len(self.out_edges[node])

    def in_degree(self, node: int) -> int:
        return len(self.in_edges[node])

    def successors(self, node: int) -> list[tuple[int, Edge]]:
        """``(node, edge)`` for every out-edge, in edge-index order."""
        self._check_index(node)
        return [(self.edges[i].dst, self.edges[i]) for i in self.out_edges[node]]

    def predecessors(self, node: int) -> list[tuple[int, Edge]]:
        self._check_index(node)
        return [(self.edges[i].src, self.edges[i]) for i in self.in_edges[node]]

    def _check_index(self, node: int) -> None:
        if not 0 <= node < len(self.nodes):
            raise IndexError(f"node index {node} out of range for {len(self.nodes)} nodes")

    def check(self) -> None:
        """Raise :class:`InconsistentGraph` unless indices and adjacency agree."""
        for i, n in enumerate(self.nodes):
            if n.index != i:
                raise InconsistentGraph(f"node {n.name!r} stored at {i} claims index {n.index}")
            if n.subgraph is not None:
                n.subgraph.check()
        outs = Counter()
        ins = Counter()
        for i, e in enumerate(self.edges):
            if e.index != i:
                raise InconsistentGraph(f"edge stored at {i} claims index {e.index}")
            if not (0 <= e.src < len(self.nodes) and 0 <= e.dst < len(self.nodes)):
                raise InconsistentGraph(f"edge {i} has an endpoint outside the node list")
            outs[e.src, i] += 1
            ins[e.dst, i] += 1
        adj_out = Counter((n, i) for n, lst in enumerate(self.out_edges) for i in lst)
        adj_in = Counter((n, i) for n, lst in enumerate(self.in_edges) for i in lst)
        if outs != adj_out or ins != adj_in:
            raise InconsistentGraph("adjacency lists disagree with the edge list")

    def walk(self) -> Iterable[tuple["ModelGraph", Node]]:
        """Every node at this level and below, parents before children."""
        for n in self.nodes:
            yield self, n
            if n.subgraph is not None:
                yield from n.subgraph.walk()


class GraphBuilder:
    """Accumulates nodes and edges, then freezes them into a :class:`ModelGraph`.

    Line ids may be any hashable key while building; :meth:`build` renumbers
    them 0, 1, ... in order of first appearance. Edges added with
    ``line=None`` each get a line of their own.
    """

    def __init__(self, prefix: str = "", parameters: dict[str, str] | None = None) -> None:
        self.prefix = prefix
        self.parameters = dict(parameters or {})
        self.nodes: list[Node] = []
        self.edges: list[tuple[int, int, int, int, Hashable, dict]] = []
        self.names: dict[str, int] = {}
        self._fresh = 0

    def add_node(
        self,
        name: str,
        block_type: str,
        parameters: dict[str, str] | None = None,
        in_ports: int = 1,
        out_ports: int = 1,
        virtual: bool = True,
        subgraph: ModelGraph | None = None,
    ) -> int:
        if name in self.names:
            raise ValueError(f"duplicate node name {name!r}")
        index = len(self.nodes)
        self.nodes.append(
            Node(index, name, block_type, dict(parameters or {}), in_ports, out_ports, virtual, subgraph)
        )
        self.names[name] = index
        return index

    def copy_node(self, node: Node, name: str | None = None, subgraph: ModelGraph | None = None) -> int:
        return self.add_node(
            node.name if name is None else name,
            node.block_type,
            node.parameters,
            node.in_ports,
            node.out_ports,
            node.virtual,
            node.subgraph if subgraph is None else subgraph,
        )

    def unique_name(self, base: str, taken: set[str] | None = None) -> str:
        taken = taken if taken is not None else set()
        if base not in self.names and base not in taken:
            return base
        k = 1
        while f"{base}_{k}" in self.names or f"{base}_{k}" in taken:
            k += 1
        return f"{base}_{k}"

    def add_edge(
        self,
        src: int,
        src_port: int,
        dst: int,
        dst_port: int,
        line: Hashable = None,
        parameters: dict[str, str] | None = None,
    ) -> None:
        if line is None:
            self._fresh += 1
            line = ("fresh", self._fresh)
        self.edges.append((src, src_port, dst, dst_port, line, dict(parameters or {})))

    def build(self) -> ModelGraph:
        line_ids: dict[Hashable, int] = {}
        edges = []
        for i, (s, sp, d, dp, line, params) in enumerate(self.edges):
            lid = line_ids.setdefault(line, len(line_ids))
            edges.append(Edge(i, s, sp, d, dp, lid, params))
        return ModelGraph(tuple(self.nodes), tuple(edges), self.prefix, self.parameters)


def _join(prefix: str, name: str) -> str:
    return f"{prefix}/{name}" if prefix else name


def build_graph(model: Model) -> ModelGraph:
    """Turn a valid model into its graph; one edge per line destination."""
    violations = validate(model)
    if violations:
        raise InvalidModel(violations)
    return _graph_of(model.root, "")


def _graph_of(system: System, prefix: str) -> ModelGraph:
    b = GraphBuilder(prefix, system.parameters)
    for blk in system.blocks:
        if isinstance(blk, Subsystem):
            sub = _graph_of(blk.system, _join(prefix, blk.name))
            b.add_node(blk.name, "SubSystem", blk.parameters, blk.in_ports, blk.out_ports, blk.virtual, sub)
        else:
            b.add_node(blk.name, blk.block_type, blk.parameters, blk.in_ports, blk.out_ports)
    for li, conn in enumerate(system.connections):
        src = b.names[conn.src.block]
        for dst in conn.dsts:
            b.add_edge(src, conn.src.port, b.names[dst.block], dst.port, li, conn.parameters)
    return b.build()


def with_prefix(graph: ModelGraph, prefix: str) -> ModelGraph:
    """Copy of ``graph`` (and its nested levels) re-rooted at ``prefix``."""
    if graph.prefix == prefix:
        return graph
    nodes = tuple(
        n if n.subgraph is None else Node(
            n.index, n.name, n.block_type, n.parameters, n.in_ports, n.out_ports, n.virtual,
            with_prefix(n.subgraph, _join(prefix, n.name)),
        )
        for n in graph.nodes
    )
    return ModelGraph(nodes, graph.edges, prefix, graph.parameters)


def to_model(graph: ModelGraph, template: Model, regroup: bool = True) -> Model:
    """Rebuild a model from ``graph``; name and metadata come from ``template``.

    With ``regroup`` edges sharing a line id (and source port) are merged
    back into one branched line; without it every edge is its own line.
    """
    graph.check()
    return Model(name=template.name, root=_system_of(graph, regroup), meta=dict(template.meta))


def _system_of(graph: ModelGraph, regroup: bool) -> System:
    blocks = []
    for n in graph.nodes:
        if n.subgraph is not None:
            blocks.append(
                Subsystem(
                    name=n.name,
                    parameters=dict(n.parameters),
                    system=_system_of(n.subgraph, regroup),
                    virtual=n.virtual,
                    in_ports=n.in_ports,
                    out_ports=n.out_ports,
                )
            )
        else:
            blocks.append(
                SimpleBlock(
                    name=n.name,
                    type=n.block_type,
                    parameters=dict(n.parameters),
                    in_ports=n.in_ports,
                    out_ports=n.out_ports,
                )
            )
    groups: dict[Hashable, list[Edge]] = {}
    for e in graph.edges:
        key = (e.line, e.src, e.src_port) if regroup else e.index
        groups.setdefault(key, []).append(e)
    conns = []
    for members in groups.values():
        first = members[0]
        conns.append(
            RawConnection(
                PortRef(graph.nodes[first.src].name, first.src_port),
                tuple(PortRef(graph.nodes[e.dst].name, e.dst_port) for e in members),
                dict(first.parameters),
            )
        )
    return System(tuple(blocks), tuple(conns), dict(graph.parameters))


def topological_order(graph: ModelGraph) -> list[int]:
    """Kahn's algorithm, always releasing the smallest ready index first.

    Raises :class:`CycleError` when the level contains a cycle.
    """
    indeg = [graph.in_degree(i) for i in range(len(graph))]
    ready = [i for i, d in enumerate(indeg) if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        n = heapq.heappop(ready)
        order.append(n)
        for i in graph.out_edges[n]:
            d = graph.edges[i].dst
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(ready, d)
    if len(order) != len(graph):
        stuck = sorted(graph.path(i) for i, d in enumerate(indeg) if d > 0)
        raise CycleError(f"graph level is cyclic; blocks on or behind cycles: {stuck}")
    return order


def is_acyclic(graph: ModelGraph) -> bool:
    try:
        topological_order(graph)
    except CycleError:
        return False
    return True


def inventory(graph: ModelGraph) -> tuple[Counter, Counter]:
    """Multisets of ``(path, block_type)`` nodes and ``(src, sp, dst, dp)`` edges over all levels."""
    nodes: Counter = Counter()
    edges: Counter = Counter()
    _inventory(graph, nodes, edges)
    return nodes, edges


def _inventory(graph: ModelGraph, nodes: Counter, edges: Counter) -> None:
    for n in graph.nodes:
        nodes[graph.path(n.index), n.block_type] += 1
        if n.subgraph is not None:
            _inventory(n.subgraph, nodes, edges)
    for e in graph.edges:
        edges[graph.path(e.src), e.src_port, graph.path(e.dst), e.dst_port] += 1

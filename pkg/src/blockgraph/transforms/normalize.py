"""Split branched (1:n) lines into independent 1:1 lines."""

from __future__ import annotations

from collections import Counter

from blockgraph.graph import GraphBuilder, ModelGraph, Node
from blockgraph.transforms.changelog import ChangeLog, edge_subject
from blockgraph.visitor import Visitor


class _Normalizer(Visitor):
    def __init__(self, log: ChangeLog) -> None:
        self.log = log
        self._sizes: dict[int, Counter] = {}

    def initial(self):
        return []

    def visit_block(self, node: Node, graph: ModelGraph):
        sizes = self._sizes.get(id(graph))
        if sizes is None:
            sizes = self._sizes[id(graph)] = Counter(e.line for e in graph.edges)
        for _, e in graph.successors(node.index):
            if sizes[e.line] > 1:
                edge = (graph.path(e.src), e.src_port, graph.path(e.dst), e.dst_port)
                self.log.add("rewired", edge_subject(edge), f"split from 1:{sizes[e.line]} line", edge)
        return node

    def visit_subsystem(self, node: Node, graph: ModelGraph):
        self.visit_block(node, graph)
        return Node(
            node.index, node.name, node.block_type, node.parameters, node.in_ports, node.out_ports,
            node.virtual, _normalize(node.subgraph, self.log),
        )


def _normalize(graph: ModelGraph, log: ChangeLog) -> ModelGraph:
    nodes = _Normalizer(log).run(graph)
    b = GraphBuilder(graph.prefix, graph.parameters)
    for n in nodes:
        b.copy_node(n)
    for e in graph.edges:
        b.add_edge(e.src, e.src_port, e.dst, e.dst_port, None, e.parameters)
    return b.build()


def normalize_connections(graph: ModelGraph) -> tuple[ModelGraph, ChangeLog]:
    """Give every edge its own line at every level.

    The multiset of (source port, destination port) pairs is unchanged; each
    edge that left a branched line is logged as ``rewired``. Idempotent.
    """
    log = ChangeLog()
    return _normalize(graph, log), log

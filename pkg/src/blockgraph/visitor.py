"""Visitor base class for graph traversals.

Subclasses override :meth:`Visitor.visit_block` and/or
:meth:`Visitor.visit_subsystem`; :meth:`Visitor.visit` picks one by testing
the node kind, so Inport/Outport and every other leaf go to ``visit_block``.
"""

from __future__ import annotations

import enum
from collections import deque
from typing import Any

from blockgraph.graph import ModelGraph, Node, topological_order


class Order(enum.Enum):
    DOCUMENT = "document"
    TOPOLOGICAL = "topological"
    BFS = "bfs"


class Visitor:
    def run(self, graph: ModelGraph, order: Order = Order.DOCUMENT, start: int | None = None) -> Any:
        return run_visitor(self, graph, order, start)

    def visit(self, node: Node, graph: ModelGraph) -> Any:
        if node.is_subsystem:
            return self.visit_subsystem(node, graph)
        return self.visit_block(node, graph)

    def visit_subsystem(self, node: Node, graph: ModelGraph) -> Any:
        return None

    def visit_block(self, node: Node, graph: ModelGraph) -> Any:
        return None

    def descend(self, node: Node, graph: ModelGraph) -> bool:
        """Whether to traverse ``node.subgraph`` right after visiting ``node``."""
        return False

    def initial(self) -> Any:
        return []

    def fold(self, acc: Any, result: Any) -> Any:
        acc.append(result)
        return acc


def visit_order(graph: ModelGraph, order: Order, start: int | None = None) -> list[int]:
    if order is Order.DOCUMENT:
        return list(range(len(graph)))
    if order is Order.TOPOLOGICAL:
        return topological_order(graph)
    if start is None:
        raise ValueError("BFS order needs a start node")
    seen = {start}
    out = []
    queue = deque([start])
    while queue:
        n = queue.popleft()
        out.append(n)
        for m, _ in graph.successors(n):
            if m not in seen:
                seen.add(m)
                queue.append(m)
    return out


def run_visitor(visitor: Visitor, graph: ModelGraph, order: Order = Order.DOCUMENT, start: int | None = None) -> Any:
    """Visit each node of ``graph`` once in ``order`` and fold the results.

    BFS visits only nodes reachable from ``start``. Nested levels are entered
    when ``visitor.descend`` says so; they are walked in document order for
    BFS and in the requested order otherwise. Topological order raises
    :class:`~blockgraph.errors.CycleError` on a cyclic level.
    """
    acc = visitor.initial()
    return _run(visitor, graph, order, start, acc)


def _run(visitor: Visitor, graph: ModelGraph, order: Order, start: int | None, acc: Any) -> Any:
    for i in visit_order(graph, order, start):
        node = graph.nodes[i]
        acc = visitor.fold(acc, visitor.visit(node, graph))
        if node.subgraph is not None and visitor.descend(node, graph):
            inner = Order.DOCUMENT if order is Order.BFS else order
            acc = _run(visitor, node.subgraph, inner, None, acc)
    return acc

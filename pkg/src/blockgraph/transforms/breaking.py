"""Remove feedback edges until every graph level is acyclic."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from blockgraph.graph import GraphBuilder, ModelGraph, Node
from blockgraph.transforms.changelog import ChangeLog


@dataclass(frozen=True)
class RemovedEdge:
    level: str
    src: str
    src_port: int
    dst: str
    dst_port: int


class _Budget(Exception):
    pass


def _shortest_cycle(n: int, edges: list[tuple[int, int]], alive: list[bool]) -> list[int] | None:
    """Edge indices of a shortest cycle among ``alive`` edges, or None."""
    out: list[list[int]] = [[] for _ in range(n)]
    for i, (s, d) in enumerate(edges):
        if alive[i]:
            if s == d:
                return [i]
            out[s].append(i)
    best = None
    for start in range(n):
        via = {start: None}
        queue = deque([start])
        found = None
        while queue and found is None:
            v = queue.popleft()
            for i in out[v]:
                w = edges[i][1]
                if w == start:
                    found = i
                    break
                if w not in via:
                    via[w] = i
                    queue.append(w)
        if found is None:
            continue
        cyc = [found]
        v = edges[found][0]
        while v != start:
            cyc.append(via[v])
            v = edges[via[v]][0]
        cyc.reverse()
        if best is None or len(cyc) < len(best):
            best = cyc
            if len(best) == 2:
                break
    return best


def _preference(cycle: list[int], delay_dst: list[bool]) -> list[int]:
    """Delay-terminated edges first, then the rest from the last discovered backwards."""
    return [i for i in reversed(cycle) if delay_dst[i]] + [i for i in reversed(cycle) if not delay_dst[i]]


def _exact(n, edges, delay_dst, limit, budget):
    alive = [True] * len(edges)
    calls = [0]

    def search(k: int) -> list[int] | None:
        calls[0] += 1
        if calls[0] > budget:
            raise _Budget
        cyc = _shortest_cycle(n, edges, alive)
        if cyc is None:
            return []
        if k == 0:
            return None
        for i in _preference(cyc, delay_dst):
            alive[i] = False
            rest = search(k - 1)
            alive[i] = True
            if rest is not None:
                return [i] + rest
        return None

    for k in range(limit + 1):
        found = search(k)
        if found is not None:
            return found
    return None


def _greedy(n, edges, delay_dst) -> list[int]:
    alive = [True] * len(edges)
    removed = []
    while (cyc := _shortest_cycle(n, edges, alive)) is not None:
        i = _preference(cyc, delay_dst)[0]
        alive[i] = False
        removed.append(i)
    return removed


def feedback_edges(graph: ModelGraph, exact_limit: int = 4, budget: int = 100_000) -> list[int]:
    """Indices of edges whose removal makes this level acyclic.

    Tries removal sets of size 0, 1, ..., ``exact_limit`` by branching over
    the edges of a shortest remaining cycle, so the first set found has
    minimum size. Within a cycle, edges into a UnitDelay are tried first,
    then edges from the last discovered backwards. When the minimum exceeds
    ``exact_limit`` or the search exceeds ``budget`` steps, edges are removed
    greedily in the same preference order, one per remaining cycle.
    """
    edges = [(e.src, e.dst) for e in graph.edges]
    delay_dst = [graph.nodes[e.dst].block_type == "UnitDelay" for e in graph.edges]
    try:
        found = _exact(len(graph), edges, delay_dst, exact_limit, budget)
    except _Budget:
        found = None
    if found is None:
        found = _greedy(len(graph), edges, delay_dst)
    return sorted(found)


def break_cycles(
    graph: ModelGraph, exact_limit: int = 4, budget: int = 100_000
) -> tuple[ModelGraph, ChangeLog, list[RemovedEdge]]:
    """Make every level of ``graph`` acyclic by deleting feedback edges."""
    log = ChangeLog()
    removed: list[RemovedEdge] = []
    return _break(graph, exact_limit, budget, log, removed), log, removed


def _break(graph, exact_limit, budget, log, removed) -> ModelGraph:
    drop = set(feedback_edges(graph, exact_limit, budget))
    subs = {n.index: _break(n.subgraph, exact_limit, budget, log, removed) for n in graph.nodes if n.subgraph is not None}
    if not drop and all(subs[i] is graph.nodes[i].subgraph for i in subs):
        return graph
    nodes = tuple(
        n if n.index not in subs else Node(
            n.index, n.name, n.block_type, n.parameters, n.in_ports, n.out_ports, n.virtual, subs[n.index]
        )
        for n in graph.nodes
    )
    b = GraphBuilder(graph.prefix, graph.parameters)
    for n in nodes:
        b.copy_node(n)
    for e in graph.edges:
        key = (graph.path(e.src), e.src_port, graph.path(e.dst), e.dst_port)
        if e.index in drop:
            log.edge(False, key, "feedback edge")
            removed.append(RemovedEdge(graph.prefix, *key))
        else:
            b.add_edge(e.src, e.src_port, e.dst, e.dst_port, e.line, e.parameters)
    return b.build()

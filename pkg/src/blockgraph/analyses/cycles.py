"""Elementary cycle enumeration on one graph level."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from blockgraph.graph import ModelGraph


@dataclass(frozen=True)
class Cycle:
    """An elementary cycle; ``nodes[0]`` is its smallest node index.

    ``edges[i]`` joins ``nodes[i]`` to ``nodes[i + 1]`` (the last one closes
    the cycle). Among parallel edges the lowest index is reported.
    """

    nodes: tuple[int, ...]
    edges: tuple[int, ...]


def _first_edges(graph: ModelGraph) -> dict[tuple[int, int], int]:
    first: dict[tuple[int, int], int] = {}
    for e in graph.edges:
        first.setdefault((e.src, e.dst), e.index)
    return first


def _component(adj: list[list[int]], radj: list[list[int]], s: int) -> set[int]:
    """Nodes >= s that lie on a common cycle with s (restricted to nodes >= s)."""

    def reach(nbrs: list[list[int]]) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for w in nbrs[v]:
                if w > s and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    return reach(adj) & reach(radj)


def detect_cycles(graph: ModelGraph) -> list[Cycle]:
    """All elementary cycles of ``graph`` (one level), sorted by node sequence.

    For every start node the search walks successors while keeping the
    current path on a stack and reports a cycle whenever the walk comes back
    to the start. Only nodes with a larger index than the start are entered,
    so each cycle is found exactly once in its canonical rotation; Johnson's
    blocking lists prune walks that cannot close. Parallel edges do not
    produce duplicate cycles.
    """
    n = len(graph)
    first = _first_edges(graph)
    adj: list[list[int]] = [[] for _ in range(n)]
    radj: list[list[int]] = [[] for _ in range(n)]
    found: list[tuple[int, ...]] = []
    for (u, v) in first:
        if u == v:
            found.append((u,))
        else:
            adj[u].append(v)
            radj[v].append(u)
    for lst in adj:
        lst.sort()

    for s in range(n):
        comp = _component(adj, radj, s)
        if len(comp) < 2:
            continue
        succ = {v: [w for w in adj[v] if w in comp] for v in comp}
        blocked = {s}
        waiting: dict[int, set[int]] = defaultdict(set)
        path = [s]
        closed: set[int] = set()
        stack = [(s, list(reversed(succ[s])))]
        while stack:
            v, todo = stack[-1]
            if todo:
                w = todo.pop()
                if w == s:
                    found.append(tuple(path))
                    closed.update(path)
                elif w not in blocked:
                    path.append(w)
                    stack.append((w, list(reversed(succ[w]))))
                    closed.discard(w)
                    blocked.add(w)
                    continue
            if not todo:
                if v in closed:
                    _unblock(v, blocked, waiting)
                else:
                    for w in succ[v]:
                        waiting[w].add(v)
                stack.pop()
                path.pop()

    found.sort()
    cycles = []
    for nodes in found:
        hops = zip(nodes, nodes[1:] + nodes[:1])
        cycles.append(Cycle(nodes, tuple(first[h] for h in hops)))
    return cycles


def _unblock(v: int, blocked: set[int], waiting: dict[int, set[int]]) -> None:
    stack = [v]
    while stack:
        x = stack.pop()
        if x in blocked:
            blocked.discard(x)
            stack.extend(waiting.pop(x, ()))

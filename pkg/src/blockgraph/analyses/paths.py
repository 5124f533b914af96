"""Fan-out to fan-in path segments, parallel paths and block counts along paths."""

from __future__ import annotations

from dataclasses import dataclass

from blockgraph.graph import ModelGraph, topological_order


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    edges: tuple[int, ...]

    @property
    def start(self) -> int:
        return self.nodes[0]

    @property
    def end(self) -> int:
        return self.nodes[-1]


@dataclass(frozen=True)
class ParallelPathGroup:
    start: int
    end: int
    paths: tuple[Path, ...]


@dataclass(frozen=True)
class BlockCount:
    paths: tuple[tuple[Path, int], ...]
    balanced: bool

    @property
    def counts(self) -> list[int]:
        return [c for _, c in self.paths]


def enumerate_paths(graph: ModelGraph) -> list[Path]:
    """Every minimal segment from a fan-out block to a fan-in block.

    A segment starts at a block with out-degree >= 2, ends at the first block
    with in-degree >= 2, and passes only through blocks with exactly one
    input and one output edge. A walk that meets another fan-out block or a
    sink before any fan-in block yields nothing. Ordered by start index, then
    by out-edge index. Raises :class:`CycleError` on a cyclic level.
    """
    topological_order(graph)
    paths = []
    for s in range(len(graph)):
        if graph.out_degree(s) < 2:
            continue
        for first in graph.out_edges[s]:
            nodes = [s]
            edges = []
            e = graph.edges[first]
            while True:
                cur = e.dst
                nodes.append(cur)
                edges.append(e.index)
                if graph.in_degree(cur) >= 2:
                    paths.append(Path(tuple(nodes), tuple(edges)))
                    break
                if graph.out_degree(cur) != 1:
                    break
                e = graph.edges[graph.out_edges[cur][0]]
    return paths


def find_parallel_paths(graph: ModelGraph) -> list[ParallelPathGroup]:
    """Paths sharing both start and end block, grouped; singletons are dropped."""
    groups: dict[tuple[int, int], list[Path]] = {}
    for p in enumerate_paths(graph):
        groups.setdefault((p.start, p.end), []).append(p)
    return [ParallelPathGroup(s, e, tuple(ps)) for (s, e), ps in groups.items() if len(ps) >= 2]


def _resolve(graph: ModelGraph, node: int | str) -> int:
    if isinstance(node, str):
        return graph.name_index[node]
    graph._check_index(node)
    return node


def all_simple_paths(graph: ModelGraph, start: int, end: int) -> list[Path]:
    """Every edge-distinct simple path from ``start`` to ``end``, depth first."""
    if start == end:
        return [Path((start,), ())]
    out = []
    nodes = [start]
    edges: list[int] = []
    on_path = {start}
    stack = [iter(graph.out_edges[start])]
    while stack:
        ei = next(stack[-1], None)
        if ei is None:
            stack.pop()
            on_path.discard(nodes.pop())
            if edges:
                edges.pop()
            continue
        d = graph.edges[ei].dst
        if d in on_path:
            continue
        if d == end:
            out.append(Path(tuple(nodes) + (d,), tuple(edges) + (ei,)))
            continue
        nodes.append(d)
        edges.append(ei)
        on_path.add(d)
        stack.append(iter(graph.out_edges[d]))
    return out


def count_blocks_on_paths(graph: ModelGraph, start: int | str, end: int | str, block_type: str) -> BlockCount:
    """Count blocks of ``block_type`` on each path from ``start`` to ``end``.

    Endpoints are counted when they match. ``balanced`` is true when every
    path carries the same count (and vacuously when there is no path).
    Raises :class:`CycleError` on a cyclic level.
    """
    topological_order(graph)
    s, t = _resolve(graph, start), _resolve(graph, end)
    counted = []
    for p in all_simple_paths(graph, s, t):
        counted.append((p, sum(1 for n in p.nodes if graph.nodes[n].block_type == block_type)))
    return BlockCount(tuple(counted), len({c for _, c in counted}) <= 1)

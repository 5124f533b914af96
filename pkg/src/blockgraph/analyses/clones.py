"""Clone detection: repeated, node-disjoint block constellations.

Two connected node sets are clones when some bijection between them keeps
block types and maps the edges among the first set (with their port pairs)
exactly onto the edges among the second. Candidate pairings are grown
breadth first from every pair of equally typed blocks; every reachable
pairing is tried and each one that cannot grow further is kept, so on small
models every maximal clone pair is found. A per-seed state budget bounds the
search on large models, after which the best pairing so far is extended
greedily.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict, deque
from dataclasses import dataclass

from blockgraph.graph import ModelGraph


@dataclass(frozen=True)
class CloneGroup:
    """Instances are aligned: ``instances[k][i]`` matches ``instances[0][i]``.

    Node indices refer to the flattened graph; ``names`` gives the same
    instances as qualified block names.
    """

    size: int
    signature: str
    instances: tuple[tuple[int, ...], ...]
    names: tuple[tuple[str, ...], ...]


def detect_clones(
    graph: ModelGraph,
    min_size: int = 2,
    match_parameters: bool = False,
    budget: int = 5000,
) -> list[CloneGroup]:
    """Flatten all subsystems, then report maximal clone groups of ``min_size`` or more blocks."""
    if min_size < 2:
        raise ValueError("min_size must be at least 2")
    if any(n.is_subsystem for n in graph.nodes):
        from blockgraph.transforms import flatten_hierarchy

        graph, _ = flatten_hierarchy(graph, include_atomic=True, warn=False)
    return find_clones(graph, min_size, match_parameters, budget)


class _Matcher:
    def __init__(self, graph: ModelGraph, match_parameters: bool) -> None:
        self.graph = graph
        if match_parameters:
            self.labels = [(n.block_type, tuple(sorted(n.parameters.items()))) for n in graph.nodes]
        else:
            self.labels = [(n.block_type,) for n in graph.nodes]
        conn: dict[tuple[int, int], list] = defaultdict(list)
        self.out: list[list] = [[] for _ in graph.nodes]
        self.inn: list[list] = [[] for _ in graph.nodes]
        for e in graph.edges:
            conn[e.src, e.dst].append((e.src_port, e.dst_port))
            self.out[e.src].append(((e.src_port, e.dst_port), e.dst))
            self.inn[e.dst].append(((e.src_port, e.dst_port), e.src))
        self.conn = {k: tuple(sorted(v)) for k, v in conn.items()}

    def links(self, u: int, v: int) -> tuple:
        return self.conn.get((u, v), ())

    def fits(self, x: int, y: int, mapping: dict[int, int], used: set[int]) -> bool:
        if x == y or x in used or y in used or self.labels[x] != self.labels[y]:
            return False
        if self.links(x, x) != self.links(y, y):
            return False
        for a, b in mapping.items():
            if self.links(x, a) != self.links(y, b) or self.links(a, x) != self.links(b, y):
                return False
        return True

    def candidates(self, pairs: tuple[tuple[int, int], ...]) -> list[tuple[int, int]]:
        mapping = dict(pairs)
        used = set(mapping) | set(mapping.values())
        out = []
        seen = set()
        for a, b in pairs:
            for adjacency in (self.out, self.inn):
                for lab, x in adjacency[a]:
                    if x in used:
                        continue
                    for lab2, y in adjacency[b]:
                        if lab2 == lab and (x, y) not in seen and self.fits(x, y, mapping, used):
                            seen.add((x, y))
                            out.append((x, y))
        return out

    def grow(self, seed: tuple[int, int], budget: int) -> list[tuple[tuple[int, int], ...]]:
        """Every maximal pairing reachable from ``seed``.

        When the state budget runs out, the largest pairing seen so far is
        extended greedily and returned alongside the maximal ones found.
        """
        start = (seed,)
        best = start
        leaves = []
        visited = {frozenset(start)}
        queue = deque([start])
        while queue:
            if len(visited) >= budget:
                while more := self.candidates(best):
                    best = best + (more[0],)
                return leaves + [best]
            state = queue.popleft()
            grown = False
            for pair in self.candidates(state):
                grown = True
                nxt = state + (pair,)
                key = frozenset(nxt)
                if key in visited:
                    continue
                visited.add(key)
                if len(nxt) > len(best):
                    best = nxt
                queue.append(nxt)
            if not grown:
                leaves.append(state)
        return leaves


def find_clones(
    graph: ModelGraph, min_size: int = 2, match_parameters: bool = False, budget: int = 5000
) -> list[CloneGroup]:
    """Clone groups on a single (already flat) graph level."""
    m = _Matcher(graph, match_parameters)
    n = len(graph)
    by_label: dict[tuple, list[int]] = defaultdict(list)
    for v in range(n):
        by_label[m.labels[v]].append(v)

    pairings: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    seen_keys = set()
    for members in by_label.values():
        for i, u in enumerate(members):
            for v in members[i + 1 :]:
                for pairs in m.grow((u, v), budget):
                    if len(pairs) < min_size:
                        continue
                    s = tuple(p[0] for p in pairs)
                    t = tuple(p[1] for p in pairs)
                    key = frozenset((frozenset(s), frozenset(t)))
                    if key not in seen_keys:
                        seen_keys.add(key)
                        pairings.append((s, t))

    sets = [(frozenset(s), frozenset(t)) for s, t in pairings]

    def dominated(a: frozenset, b: frozenset) -> bool:
        return any(
            len(qs) > len(a) and ((a <= qs and b <= qt) or (a <= qt and b <= qs)) for qs, qt in sets
        )

    kept = [p for p, (ss, tt) in zip(pairings, sets) if not dominated(ss, tt)]
    return _group(graph, m, kept, dominated)


def _group(graph: ModelGraph, m: _Matcher, pairings, dominated) -> list[CloneGroup]:
    """Merge pairings that share an instance, then split into groups of compatible instances.

    Two instances are compatible when they are disjoint and their pair is not
    contained in a larger clone pair. Instances join the first compatible
    group in discovery order; a maximal pair left without a common group
    forms one of its own.
    """
    ids: dict[frozenset, int] = {}
    tuples: list[tuple[int, ...]] = []
    links: dict[int, list[tuple[int, dict[int, int]]]] = defaultdict(list)
    for s, t in pairings:
        for inst in (s, t):
            if frozenset(inst) not in ids:
                ids[frozenset(inst)] = len(tuples)
                tuples.append(inst)
        i, j = ids[frozenset(s)], ids[frozenset(t)]
        links[i].append((j, dict(zip(s, t))))
        links[j].append((i, dict(zip(t, s))))
    members = [frozenset(t) for t in tuples]

    def compatible(i: int, bucket: list[int]) -> bool:
        return all(not members[i] & members[k] and not dominated(members[i], members[k]) for k in bucket)

    aligned: dict[int, tuple[int, ...]] = {}
    buckets: list[list[int]] = []
    for root in range(len(tuples)):
        if root in aligned:
            continue
        aligned[root] = tuples[root]
        component = [root]
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j, mapping in links[i]:
                if j not in aligned:
                    aligned[j] = tuple(mapping[x] for x in aligned[i])
                    component.append(j)
                    queue.append(j)
        splits: list[list[int]] = []
        for i in sorted(component):
            for bucket in splits:
                if compatible(i, bucket):
                    bucket.append(i)
                    break
            else:
                splits.append([i])
        together = {(i, j) for bucket in splits for i in bucket for j in bucket}
        extra: list[list[int]] = []
        for i in sorted(component):
            for j, _ in links[i]:
                if i < j and (i, j) not in together:
                    for bucket in extra:
                        if i in bucket and compatible(j, bucket) or j in bucket and compatible(i, bucket):
                            bucket.append(j if i in bucket else i)
                            break
                    else:
                        extra.append([i, j])
                    together |= {(a, b) for bucket in extra for a in bucket for b in bucket}
        buckets += [b for b in splits if len(b) >= 2] + extra

    groups: list[CloneGroup] = []
    for bucket in buckets:
        insts = sorted((aligned[i] for i in bucket), key=sorted)
        groups.append(
            CloneGroup(
                size=len(insts[0]),
                signature=_signature(m, insts[0]),
                instances=tuple(insts),
                names=tuple(tuple(graph.nodes[v].name for v in inst) for inst in insts),
            )
        )
    groups.sort(key=lambda g: (-g.size, sorted(g.instances[0]), len(g.instances)))
    return groups


def _digest(obj) -> str:
    return hashlib.sha1(repr(obj).encode()).hexdigest()


def _signature(m: _Matcher, nodes: tuple[int, ...]) -> str:
    """Isomorphism-invariant label of the subgraph induced by ``nodes`` (colour refinement)."""
    colors = {v: _digest(m.labels[v]) for v in nodes}
    for _ in range(len(nodes)):
        colors = {
            v: _digest(
                (
                    colors[v],
                    sorted((m.links(v, w), colors[w]) for w in nodes if m.links(v, w)),
                    sorted((m.links(w, v), colors[w]) for w in nodes if m.links(w, v)),
                )
            )
            for v in nodes
        }
    return f"{len(nodes)}:{_digest(sorted(colors.values()))[:16]}"

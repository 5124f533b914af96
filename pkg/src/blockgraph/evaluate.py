"""Tiny synchronous dataflow evaluator used to check that transforms keep behaviour.

Signals are single float scalars, all blocks run at one rate. Supported
blocks: Constant, Gain, Sum, Product, UnitDelay, Inport, Outport,
Terminator, plus subsystems (virtual or atomic), whose Inport/Outport blocks
only route signals. Hierarchy is resolved signal by signal, independently
of :func:`~blockgraph.transforms.flatten_hierarchy`.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass

from blockgraph.errors import BadParameter, EvalError, UnresolvableCycle, UnsupportedBlock
from blockgraph.graph import ModelGraph, Node
from blockgraph.model import input_signs, port_numbers

VOCABULARY = frozenset({"Constant", "Gain", "Sum", "Product", "UnitDelay", "Inport", "Outport", "Terminator"})

_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class Trace:
    steps: int
    values: dict[str, list[float]]


@dataclass
class _Level:
    graph: ModelGraph
    parent: "_Level | None" = None
    owner: int | None = None  # index of the subsystem node in parent.graph


@dataclass
class _Leaf:
    level: _Level
    node: Node
    key: str
    drivers: list  # per input port: (leaf index, out port) or None


def _number(node: Node, key: str, default: str) -> float:
    raw = node.parameters.get(key, default).strip()
    if not _DECIMAL.match(raw):
        raise BadParameter(f"block {node.name!r}: {key}={raw!r} is not a decimal number")
    return float(raw)


def _sink_name(level: _Level, node: Node) -> str:
    parts = [node.name]
    while level.parent is not None:
        parts.append(level.parent.graph.nodes[level.owner].name)
        level = level.parent
    return ".".join(reversed(parts))


class _Resolver:
    def __init__(self, root: ModelGraph) -> None:
        self.root = _Level(root)
        self.leaves: list[_Leaf] = []
        self.index: dict[tuple[int, int], int] = {}
        self._collect(self.root)
        for leaf in self.leaves:
            leaf.drivers = [self._driver(leaf.level, leaf.node.index, p) for p in range(1, leaf.node.in_ports + 1)]

    def _collect(self, level: _Level) -> None:
        for n in level.graph.nodes:
            if n.subgraph is not None:
                self._collect(_Level(n.subgraph, level, n.index))
                continue
            if n.block_type not in VOCABULARY:
                raise UnsupportedBlock(f"block {n.name!r} of type {n.block_type!r} cannot be evaluated")
            if level.parent is not None and n.block_type in ("Inport", "Outport"):
                continue
            self.index[id(level.graph), n.index] = len(self.leaves)
            self.leaves.append(_Leaf(level, n, _sink_name(level, n), []))

    def _driver(self, level: _Level, node: int, port: int, hops: frozenset = frozenset()):
        edges = [level.graph.edges[i] for i in level.graph.in_edges[node] if level.graph.edges[i].dst_port == port]
        if not edges:
            return None
        if len(edges) > 1:
            raise EvalError(f"input {port} of {level.graph.path(node)!r} has {len(edges)} drivers")
        hop = (id(level.graph), node, port)
        if hop in hops:
            raise UnresolvableCycle(f"signal loop through port blocks only at {level.graph.path(node)!r}")
        return self._source(level, edges[0].src, edges[0].src_port, hops | {hop})

    def _source(self, level: _Level, node: int, port: int, hops: frozenset):
        n = level.graph.nodes[node]
        if n.subgraph is not None:
            sub = _Level(n.subgraph, level, node)
            outs = [m for m in n.subgraph.nodes if m.block_type == "Outport"]
            for k, m in zip(port_numbers(outs), outs):
                if k == port:
                    return self._driver(sub, m.index, 1, hops)
            raise EvalError(f"subsystem {level.graph.path(node)!r} has no Outport {port}")
        if n.block_type == "Inport" and level.parent is not None:
            ins = [m for m in level.graph.nodes if m.block_type == "Inport"]
            k = dict(zip((m.index for m in ins), port_numbers(ins)))[node]
            return self._driver(level.parent, level.owner, k, hops)
        return self.index[id(level.graph), node], port


def evaluate(graph: ModelGraph, inputs: dict[str, list[float]], steps: int) -> Trace:
    """Run ``graph`` for ``steps`` steps and record every sink.

    ``inputs`` maps each top-level Inport name to at least ``steps`` values.
    Sinks are top-level Outports and Terminators at any depth; nested sinks
    are named ``"<subsystem>.<block>"``. Unconnected inputs read 0. UnitDelay
    starts at 0 and is the only block allowed to close a loop.
    """
    if steps < 1:
        raise BadParameter("steps must be at least 1")
    r = _Resolver(graph)
    leaves = r.leaves

    deps: list[set[int]] = [set() for _ in leaves]
    users: list[set[int]] = [set() for _ in leaves]
    for i, leaf in enumerate(leaves):
        if leaf.node.block_type == "UnitDelay":
            continue
        for d in leaf.drivers:
            if d is not None:
                deps[i].add(d[0])
                users[d[0]].add(i)
    pending = [len(d) for d in deps]
    ready = [i for i, k in enumerate(pending) if k == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in sorted(users[i]):
            pending[j] -= 1
            if pending[j] == 0:
                heapq.heappush(ready, j)
    if len(order) != len(leaves):
        stuck = sorted(leaves[i].key for i, k in enumerate(pending) if k > 0)
        raise UnresolvableCycle(f"algebraic loop without UnitDelay through {stuck}")

    params: dict[int, object] = {}
    streams: dict[int, list[float]] = {}
    for i, leaf in enumerate(leaves):
        n = leaf.node
        t = n.block_type
        if t == "Constant":
            params[i] = _number(n, "Value", "1")
        elif t == "Gain":
            params[i] = _number(n, "Gain", "1")
        elif t in ("Sum", "Product"):
            try:
                params[i] = input_signs(n.parameters, ops="+-" if t == "Sum" else "*/")
            except ValueError as exc:
                raise BadParameter(f"block {n.name!r}: {exc}") from None
        elif t == "Inport" and leaf.level.parent is None:
            if n.name not in inputs:
                raise BadParameter(f"no input stream for Inport {n.name!r}")
            stream = [float(v) for v in inputs[n.name]]
            if len(stream) < steps:
                raise BadParameter(f"input stream for {n.name!r} has {len(stream)} values, need {steps}")
            streams[i] = stream

    sinks = [i for i, leaf in enumerate(leaves) if leaf.node.block_type in ("Outport", "Terminator")]
    trace: dict[str, list[float]] = {leaves[i].key: [] for i in sinks}
    state = {i: 0.0 for i, leaf in enumerate(leaves) if leaf.node.block_type == "UnitDelay"}
    out: dict[int, float] = {}

    def read(d) -> float:
        return 0.0 if d is None else out[d[0]]

    for step in range(steps):
        for i in order:
            leaf = leaves[i]
            t = leaf.node.block_type
            if t == "Constant":
                out[i] = params[i]
            elif t == "Gain":
                out[i] = params[i] * read(leaf.drivers[0])
            elif t == "Sum":
                acc = None
                for sign, d in zip(params[i], leaf.drivers):
                    v = read(d) if sign == "+" else -read(d)
                    acc = v if acc is None else acc + v
                out[i] = 0.0 if acc is None else acc
            elif t == "Product":
                acc = None
                try:
                    for op, d in zip(params[i], leaf.drivers):
                        v = read(d)
                        if acc is None:
                            acc = v if op == "*" else 1.0 / v
                        else:
                            acc = acc * v if op == "*" else acc / v
                except ZeroDivisionError:
                    raise EvalError(f"division by zero in {leaf.key!r} at step {step}") from None
                out[i] = 1.0 if acc is None else acc
            elif t == "UnitDelay":
                out[i] = state[i]
            elif t == "Inport":
                out[i] = streams[i][step]
            else:
                trace[leaf.key].append(read(leaf.drivers[0]))
        for i in state:
            state[i] = read(leaves[i].drivers[0])
    return Trace(steps, trace)

"""Longest node-weighted path, with weights read from ``UserData``."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from blockgraph.errors import WeightParseError
from blockgraph.graph import ModelGraph, Node, topological_order
from blockgraph.visitor import Visitor

_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class WeightedPathResult:
    total_weight: float
    path: tuple[int, ...]


def parse_user_data(text: str) -> dict[str, str]:
    """Split ``"k=v;k2=v2"`` into an ordered dict. Empty segments are ignored."""
    out: dict[str, str] = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValueError(f"malformed UserData entry {part!r}")
        if key in out:
            raise ValueError(f"duplicate UserData key {key!r}")
        out[key] = value.strip()
    return out


def format_user_data(data: dict[str, str]) -> str:
    for k, v in data.items():
        if not k or any(c in k for c in ";=") or ";" in v or k != k.strip() or v != v.strip():
            raise ValueError(f"cannot encode UserData entry {k!r}={v!r}")
    return ";".join(f"{k}={v}" for k, v in data.items())


def block_weight(node: Node, key: str, default: float) -> float:
    raw = node.parameters.get("UserData")
    if raw is None:
        return default
    try:
        data = parse_user_data(raw)
    except ValueError as exc:
        raise WeightParseError(node.name, str(exc)) from None
    if key not in data:
        return default
    value = data[key]
    if not _DECIMAL.match(value):
        raise WeightParseError(node.name, f"{key}={value!r} is not a decimal number")
    weight = float(value)
    if weight < 0 or not math.isfinite(weight):
        raise WeightParseError(node.name, f"{key}={value!r} is not a non-negative finite number")
    return weight


class _WeightVisitor(Visitor):
    def __init__(self, key: str, default: float) -> None:
        self.key = key
        self.default = default

    def visit_block(self, node, graph):
        return block_weight(node, self.key, self.default)

    visit_subsystem = visit_block


def longest_weighted_path(graph: ModelGraph, weight_key: str = "wcet", default_weight: float = 0.0) -> WeightedPathResult:
    """Heaviest source-to-sink path, weight being the sum of node weights.

    Dynamic programming over a topological order. Ties go to the smaller
    predecessor/sink index. Raises :class:`CycleError` on a cyclic level and
    :class:`WeightParseError` on unreadable weights.
    """
    order = topological_order(graph)
    weights = _WeightVisitor(weight_key, float(default_weight)).run(graph)
    best: list[float] = [0.0] * len(graph)
    back: list[int | None] = [None] * len(graph)
    for v in order:
        pred = None
        for u, _ in graph.predecessors(v):
            if pred is None or best[u] > best[pred] or (best[u] == best[pred] and u < pred):
                pred = u
        best[v] = weights[v] if pred is None else best[pred] + weights[v]
        back[v] = pred
    sinks = [v for v in range(len(graph)) if graph.out_degree(v) == 0]
    if not sinks:
        return WeightedPathResult(0.0, ())
    end = max(sinks, key=lambda v: (best[v], -v))
    path = [end]
    while back[path[-1]] is not None:
        path.append(back[path[-1]])
    return WeightedPathResult(best[end], tuple(reversed(path)))

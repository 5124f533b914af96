"""JSON-ready report records for analysis results."""

from __future__ import annotations

from typing import Any

from blockgraph.analyses.clones import CloneGroup
from blockgraph.analyses.cycles import Cycle
from blockgraph.analyses.paths import BlockCount, ParallelPathGroup, Path
from blockgraph.analyses.wcet import WeightedPathResult
from blockgraph.graph import ModelGraph

SCHEMA = 1


def report(analysis: str, model: str, results: Any, key: str | None = None) -> dict[str, Any]:
    """Top-level report; the results sit under ``key``, which defaults to the analysis name."""
    return {"schema": SCHEMA, "analysis": analysis, "model": model, key or analysis: results}


def _names(graph: ModelGraph, nodes) -> list[str]:
    return [graph.path(n) for n in nodes]


def cycle_record(graph: ModelGraph, c: Cycle) -> dict[str, Any]:
    return {"blocks": _names(graph, c.nodes), "edges": list(c.edges)}


def path_record(graph: ModelGraph, p: Path) -> dict[str, Any]:
    return {
        "start": graph.path(p.start),
        "end": graph.path(p.end),
        "blocks": _names(graph, p.nodes),
        "edges": list(p.edges),
    }


def parallel_record(graph: ModelGraph, g: ParallelPathGroup) -> dict[str, Any]:
    return {
        "start": graph.path(g.start),
        "end": graph.path(g.end),
        "paths": [path_record(graph, p) for p in g.paths],
    }


def count_record(graph: ModelGraph, block_type: str, result: BlockCount) -> dict[str, Any]:
    return {
        "block_type": block_type,
        "balanced": result.balanced,
        "paths": [{"blocks": _names(graph, p.nodes), "count": c} for p, c in result.paths],
    }


def clone_record(g: CloneGroup) -> dict[str, Any]:
    return {"size": g.size, "signature": g.signature, "instances": [list(i) for i in g.names]}


def wcet_record(graph: ModelGraph, r: WeightedPathResult) -> dict[str, Any]:
    return {"total_weight": r.total_weight, "path": _names(graph, r.path)}

"""Replayable record of the edits a transform made."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from blockgraph.graph import ModelGraph, inventory

KINDS = ("added-block", "removed-block", "added-edge", "removed-edge", "rewired", "parameter-changed")

EdgeKey = tuple[str, int, str, int]


@dataclass(frozen=True)
class Change:
    kind: str
    subject: str
    detail: str = ""
    edge: EdgeKey | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "subject": self.subject, "detail": self.detail}
        if self.edge is not None:
            d["edge"] = list(self.edge)
        return d


def edge_subject(edge: EdgeKey) -> str:
    src, sp, dst, dp = edge
    return f"{src}:{sp} -> {dst}:{dp}"


class ChangeLog:
    def __init__(self) -> None:
        self.entries: list[Change] = []

    def __iter__(self) -> Iterator[Change]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def add(self, kind: str, subject: str, detail: str = "", edge: EdgeKey | None = None) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown change kind {kind!r}")
        self.entries.append(Change(kind, subject, detail, edge))

    def block(self, added: bool, path: str, block_type: str) -> None:
        self.add("added-block" if added else "removed-block", path, block_type)

    def edge(self, added: bool, edge: EdgeKey, detail: str = "") -> None:
        self.add("added-edge" if added else "removed-edge", edge_subject(edge), detail, edge)

    def extend(self, other: "ChangeLog") -> None:
        self.entries.extend(other.entries)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(c.to_dict(), sort_keys=False) + "\n" for c in self.entries)

    @classmethod
    def from_jsonl(cls, text: str) -> "ChangeLog":
        log = cls()
        for line in text.splitlines():
            if line.strip():
                d = json.loads(line)
                edge = tuple(d["edge"]) if "edge" in d else None
                log.add(d["kind"], d["subject"], d.get("detail", ""), edge)
        return log


def replay(graph: ModelGraph, log: ChangeLog) -> tuple[Counter, Counter]:
    """Apply the logged additions and removals to ``graph``'s node/edge multisets."""
    nodes, edges = inventory(graph)
    nodes, edges = Counter(nodes), Counter(edges)
    for c in log:
        if c.kind == "added-block":
            nodes[c.subject, c.detail] += 1
        elif c.kind == "removed-block":
            nodes[c.subject, c.detail] -= 1
        elif c.kind == "added-edge":
            edges[c.edge] += 1
        elif c.kind == "removed-edge":
            edges[c.edge] -= 1
    return +nodes, +edges

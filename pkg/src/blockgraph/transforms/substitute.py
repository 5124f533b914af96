"""Replace every block matching a rule with a small template subgraph."""

from __future__ import annotations

from dataclasses import dataclass, field

from blockgraph.errors import PortMappingError, RuleError
from blockgraph.graph import GraphBuilder, ModelGraph, Node
from blockgraph.model import default_ports
from blockgraph.transforms.changelog import ChangeLog
from blockgraph.visitor import Visitor


@dataclass(frozen=True)
class ParamTransfer:
    """Copy ``source`` from the matched block into template parameter ``target``."""

    target: str
    source: str
    default: str | None = None


@dataclass(frozen=True)
class TemplateBlock:
    name: str
    block_type: str
    parameters: dict[str, str] = field(default_factory=dict)
    transfers: tuple[ParamTransfer, ...] = ()

    def ports(self) -> tuple[int, int]:
        return default_ports(self.block_type, self.parameters)


@dataclass(frozen=True)
class SubstitutionRule:
    """Match by block type (plus optional exact parameter values) and replace.

    ``inputs`` maps each input port of the matched block to ``(template
    block, input port)``; ``outputs`` maps each output port to ``(template
    block, output port)``; ``connections`` are edges inside the template as
    ``(src block, src port, dst block, dst port)``.
    """

    name: str
    match_type: str
    blocks: tuple[TemplateBlock, ...]
    inputs: dict[int, tuple[str, int]]
    outputs: dict[int, tuple[str, int]]
    connections: tuple[tuple[str, int, str, int], ...] = ()
    match_parameters: dict[str, str] = field(default_factory=dict)

    def matches(self, node: Node) -> bool:
        if node.block_type != self.match_type:
            return False
        return all(node.parameters.get(k) == v for k, v in self.match_parameters.items())

    def check(self) -> None:
        """Raise :class:`RuleError` unless the template is well formed.

        Every template input port must be fed exactly once, either by an
        internal connection or by one mapped input.
        """
        ports: dict[str, tuple[int, int]] = {}
        for tb in self.blocks:
            if tb.name in ports:
                raise RuleError(f"rule {self.name!r}: template block {tb.name!r} defined twice")
            try:
                ports[tb.name] = tb.ports()
            except ValueError as exc:
                raise RuleError(f"rule {self.name!r}: {exc}") from None
        if not self.blocks:
            raise RuleError(f"rule {self.name!r}: empty template")

        def need(block: str, port: int, side: int, what: str) -> None:
            if block not in ports:
                raise RuleError(f"rule {self.name!r}: {what} names unknown template block {block!r}")
            if not 1 <= port <= ports[block][side]:
                raise RuleError(f"rule {self.name!r}: {what} uses missing port {port} of {block!r}")

        fed: dict[tuple[str, int], int] = {}
        for s, sp, d, dp in self.connections:
            need(s, sp, 1, "connection")
            need(d, dp, 0, "connection")
            fed[d, dp] = fed.get((d, dp), 0) + 1
        for k, (d, dp) in self.inputs.items():
            if k < 1:
                raise RuleError(f"rule {self.name!r}: input port {k} is not positive")
            need(d, dp, 0, f"input map {k}")
            fed[d, dp] = fed.get((d, dp), 0) + 1
        for k, (s, sp) in self.outputs.items():
            if k < 1:
                raise RuleError(f"rule {self.name!r}: output port {k} is not positive")
            need(s, sp, 1, f"output map {k}")
        for tb in self.blocks:
            for p in range(1, ports[tb.name][0] + 1):
                if fed.get((tb.name, p), 0) != 1:
                    raise RuleError(
                        f"rule {self.name!r}: input {p} of {tb.name!r} is fed {fed.get((tb.name, p), 0)} times"
                    )

    def instantiate(self, node: Node) -> list[tuple[TemplateBlock, dict[str, str]]]:
        out = []
        for tb in self.blocks:
            params = dict(tb.parameters)
            for t in tb.transfers:
                if t.source in node.parameters:
                    params[t.target] = node.parameters[t.source]
                elif t.default is not None:
                    params[t.target] = t.default
                else:
                    raise PortMappingError(
                        f"rule {self.name!r}: block {node.name!r} has no parameter {t.source!r} to transfer"
                    )
            out.append((tb, params))
        return out


class _Matches(Visitor):
    """Collect the indices of matching blocks at one level."""

    def __init__(self, rule: SubstitutionRule) -> None:
        self.rule = rule

    def visit_block(self, node, graph):
        return node.index if self.rule.matches(node) else None

    def fold(self, acc, result):
        if result is not None:
            acc.append(result)
        return acc


def substitute(graph: ModelGraph, rule: SubstitutionRule) -> tuple[ModelGraph, ChangeLog]:
    """Replace every block matched by ``rule``, at every level, in one pass.

    Inserted template blocks are never matched again. Edges of a replaced
    block are re-attached through the rule's port maps; an edge on an
    unmapped port raises :class:`PortMappingError`.
    """
    rule.check()
    log = ChangeLog()
    return _substitute(graph, rule, log), log


def _substitute(graph: ModelGraph, rule: SubstitutionRule, log: ChangeLog) -> ModelGraph:
    matched = set(_Matches(rule).run(graph))
    if not matched and not any(n.is_subsystem for n in graph.nodes):
        return graph

    b = GraphBuilder(graph.prefix, graph.parameters)
    new_index: dict[int, int] = {}
    template_index: dict[int, dict[str, int]] = {}
    taken = {n.name for n in graph.nodes if n.index not in matched}
    for n in graph.nodes:
        if n.index in matched:
            log.block(False, graph.path(n.index), n.block_type)
            slots = {}
            for tb, params in rule.instantiate(n):
                name = b.unique_name(f"{n.name}_{tb.name}", taken)
                taken.add(name)
                n_in, n_out = default_ports(tb.block_type, params)
                slots[tb.name] = b.add_node(name, tb.block_type, params, n_in, n_out)
                log.block(True, _path(graph, name), tb.block_type)
            template_index[n.index] = slots
        elif n.subgraph is not None:
            new_index[n.index] = b.copy_node(n, subgraph=_substitute(n.subgraph, rule, log))
        else:
            new_index[n.index] = b.copy_node(n)

    for e in graph.edges:
        if e.src not in matched and e.dst not in matched:
            b.add_edge(new_index[e.src], e.src_port, new_index[e.dst], e.dst_port, e.line, e.parameters)
            continue
        log.edge(False, (graph.path(e.src), e.src_port, graph.path(e.dst), e.dst_port))
        if e.src in matched:
            if e.src_port not in rule.outputs:
                raise PortMappingError(f"output {e.src_port} of {graph.path(e.src)!r} is not mapped by rule {rule.name!r}")
            tname, sp = rule.outputs[e.src_port]
            s = template_index[e.src][tname]
        else:
            s, sp = new_index[e.src], e.src_port
        if e.dst in matched:
            if e.dst_port not in rule.inputs:
                raise PortMappingError(f"input {e.dst_port} of {graph.path(e.dst)!r} is not mapped by rule {rule.name!r}")
            tname, dp = rule.inputs[e.dst_port]
            d = template_index[e.dst][tname]
        else:
            d, dp = new_index[e.dst], e.dst_port
        b.add_edge(s, sp, d, dp, e.line, e.parameters)
        log.edge(True, (_path(graph, b.nodes[s].name), sp, _path(graph, b.nodes[d].name), dp))

    for idx in sorted(matched):
        slots = template_index[idx]
        for s, sp, d, dp in rule.connections:
            b.add_edge(slots[s], sp, slots[d], dp)
            log.edge(True, (_path(graph, b.nodes[slots[s]].name), sp, _path(graph, b.nodes[slots[d]].name), dp))
    return b.build()


def _path(graph: ModelGraph, name: str) -> str:
    return f"{graph.prefix}/{name}" if graph.prefix else name

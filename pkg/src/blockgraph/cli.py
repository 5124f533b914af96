"""Command-line front end.

Exit codes: 0 success, 1 findings present under ``--strict``, 2 parse or
usage error, 3 precondition error (cyclic graph, invalid model, ...).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from blockgraph import analyses
from blockgraph.analyses import report as rep
from blockgraph.errors import BlockGraphError, ParseError, RuleError
from blockgraph.evaluate import evaluate
from blockgraph.graph import ModelGraph, build_graph, to_model
from blockgraph.mdl import load, serialize
from blockgraph.model import validate
from blockgraph.transforms import (
    break_cycles,
    builtin_rules,
    flatten_hierarchy,
    load_rules,
    normalize_connections,
    substitute,
)

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blockgraph", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, output=True):
        sp.add_argument("--format", choices=("json", "text"), default="json")
        if output:
            sp.add_argument("-o", "--output", help="write here instead of standard output")

    v = sub.add_parser("validate", help="check model invariants")
    v.add_argument("file")
    v.add_argument("--strict", action="store_true", help="exit 1 when violations are found")
    common(v)

    g = sub.add_parser("graph", help="dump nodes and edges")
    g.add_argument("file")
    common(g)

    a = sub.add_parser("analyze", help="run an analysis")
    asub = a.add_subparsers(dest="analysis", required=True)
    for name, help_ in (
        ("cycles", "elementary cycles"),
        ("paths", "fan-out to fan-in paths"),
        ("parallel", "parallel path groups"),
        ("count", "count blocks of a type on every path between two blocks"),
        ("clones", "repeated block constellations"),
        ("wcet", "longest node-weighted path"),
    ):
        sp = asub.add_parser(name, help=help_)
        sp.add_argument("file")
        sp.add_argument("--strict", action="store_true", help="exit 1 when findings are present")
        sp.add_argument("--flatten", action="store_true", help="flatten all subsystems first")
        common(sp)
        if name == "count":
            sp.add_argument("--type", required=True, dest="block_type")
            sp.add_argument("--from", required=True, dest="start")
            sp.add_argument("--to", required=True, dest="end")
        elif name == "clones":
            sp.add_argument("--min-size", type=int, default=2)
            sp.add_argument("--match-parameters", action="store_true")
        elif name == "wcet":
            sp.add_argument("--key", default="wcet")
            sp.add_argument("--default", type=float, default=0.0)

    t = sub.add_parser("transform", help="apply a transformation")
    tsub = t.add_subparsers(dest="transform", required=True)
    for name in ("normalize", "flatten", "substitute", "break-cycles"):
        sp = tsub.add_parser(name)
        sp.add_argument("file")
        sp.add_argument("-o", "--output", help="output model file (default: standard output)")
        sp.add_argument("--log", help="write the change log here as JSON lines")
        if name == "flatten":
            sp.add_argument("--include-atomic", action="store_true")
        elif name == "substitute":
            sp.add_argument("--rules", help="rules file (default: built-in gain rule)")

    e = sub.add_parser("eval", help="run the reference evaluator")
    e.add_argument("file")
    e.add_argument("--inputs", default="", help='streams, e.g. "in1=1,2,3;in2=0,0,1"')
    e.add_argument("--steps", type=int, required=True)
    common(e)
    return p


def _graph(path: str, flatten: bool = False) -> tuple[Any, ModelGraph]:
    model = load(path)
    graph = build_graph(model)
    if flatten:
        graph, _ = flatten_hierarchy(graph, include_atomic=True, warn=False)
    return model, graph


def _emit(args, payload: Any, text_lines: list[str] | None = None) -> None:
    if args.format == "text" and text_lines is not None:
        body = "\n".join(text_lines) + ("\n" if text_lines else "")
    else:
        body = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _cmd_validate(args) -> int:
    model = load(args.file)
    violations = validate(model)
    payload = rep.report(
        "validate", model.name, [{"code": v.code, "path": v.path, "message": v.message} for v in violations],
        key="violations",
    )
    _emit(args, payload, [str(v) for v in violations] or ["ok"])
    return EXIT_FINDINGS if violations and args.strict else EXIT_OK


def _cmd_graph(args) -> int:
    model, graph = _graph(args.file)
    levels = []
    lines = []
    for g in [graph] + [n.subgraph for _, n in graph.walk() if n.subgraph is not None]:
        levels.append(
            {
                "prefix": g.prefix,
                "nodes": [
                    {"index": n.index, "name": n.name, "type": n.block_type, "in_ports": n.in_ports, "out_ports": n.out_ports}
                    for n in g.nodes
                ],
                "edges": [
                    {"index": e.index, "src": g.path(e.src), "src_port": e.src_port, "dst": g.path(e.dst),
                     "dst_port": e.dst_port, "line": e.line}
                    for e in g.edges
                ],
            }
        )
        lines += [f"node {g.path(n.index)} {n.block_type}" for n in g.nodes]
        lines += [f"edge {g.path(e.src)}:{e.src_port} -> {g.path(e.dst)}:{e.dst_port}" for e in g.edges]
    _emit(args, {"schema": rep.SCHEMA, "model": model.name, "levels": levels}, lines)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    model, graph = _graph(args.file, args.flatten)
    kind = args.analysis
    if kind == "cycles":
        results = [rep.cycle_record(graph, c) for c in analyses.detect_cycles(graph)]
        findings = bool(results)
        text = [" -> ".join(r["blocks"]) for r in results]
    elif kind == "paths":
        results = [rep.path_record(graph, p) for p in analyses.enumerate_paths(graph)]
        findings = bool(results)
        text = [" -> ".join(r["blocks"]) for r in results]
    elif kind == "parallel":
        results = [rep.parallel_record(graph, g) for g in analyses.find_parallel_paths(graph)]
        findings = bool(results)
        text = [f"{r['start']} => {r['end']}: {len(r['paths'])} paths" for r in results]
    elif kind == "count":
        try:
            s, t = graph.name_index[args.start], graph.name_index[args.end]
        except KeyError as exc:
            raise _Usage(f"no block named {exc.args[0]!r} at the top level") from None
        res = analyses.count_blocks_on_paths(graph, s, t, args.block_type)
        results = rep.count_record(graph, args.block_type, res)
        findings = not res.balanced
        text = [f"{' -> '.join(p['blocks'])}: {p['count']}" for p in results["paths"]]
        text.append(f"balanced: {str(res.balanced).lower()}")
    elif kind == "clones":
        groups = analyses.detect_clones(graph, args.min_size, args.match_parameters)
        results = [rep.clone_record(g) for g in groups]
        findings = bool(results)
        text = [f"size {r['size']}: " + " | ".join(", ".join(i) for i in r["instances"]) for r in results]
    else:
        res = analyses.longest_weighted_path(graph, args.key, args.default)
        results = rep.wcet_record(graph, res)
        findings = False
        text = [f"{res.total_weight:g}: {' -> '.join(results['path'])}"]
    _emit(args, rep.report(kind, model.name, results), text)
    return EXIT_FINDINGS if findings and args.strict else EXIT_OK


def _cmd_transform(args) -> int:
    model, graph = _graph(args.file)
    kind = args.transform
    if kind == "normalize":
        out, log = normalize_connections(graph)
    elif kind == "flatten":
        out, log = flatten_hierarchy(graph, include_atomic=args.include_atomic)
    elif kind == "substitute":
        rules = load_rules(args.rules) if args.rules else builtin_rules("gain")
        out = graph
        log = None
        for rule in rules:
            out, step = substitute(out, rule)
            if log is None:
                log = step
            else:
                log.extend(step)
    else:
        out, log, _ = break_cycles(graph)
    text = serialize(to_model(out, model))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.log:
        with open(args.log, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(log.to_jsonl() if log is not None else "")
    return EXIT_OK


def _parse_inputs(spec: str) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {}
    for part in spec.split(";"):
        if not part.strip():
            continue
        name, sep, values = part.partition("=")
        if not sep:
            raise _Usage(f"bad --inputs entry {part!r}; expected name=v1,v2,...")
        try:
            out[name.strip()] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise _Usage(f"bad number in --inputs entry {part!r}") from None
    return out


def _cmd_eval(args) -> int:
    model, graph = _graph(args.file)
    trace = evaluate(graph, _parse_inputs(args.inputs), args.steps)
    payload = {"schema": rep.SCHEMA, "model": model.name, "steps": trace.steps, "trace": trace.values}
    _emit(args, payload, [f"{k}: {' '.join(f'{v:g}' for v in vs)}" for k, vs in trace.values.items()])
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "graph": _cmd_graph,
    "analyze": _cmd_analyze,
    "transform": _cmd_transform,
    "eval": _cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, RuleError, _Usage, OSError) as exc:
        print(f"blockgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BlockGraphError as exc:
        print(f"blockgraph: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())

"""Reader and writer for the textual block-diagram format.

The format is a small, exactly defined subset of the Simulink MDL layout::

    document := "Model" "{" entry* "}"
    entry    := key value | section
    section  := ("System" | "Block" | "Line" | "Branch") "{" entry* "}"
    key      := [A-Za-z_][A-Za-z0-9_]*
    value    := quoted string (escapes \\" and \\\\) | bare token

``#`` starts a comment running to the end of the line. Files conventionally
use the ``.bdm`` extension; ``.mdl`` files in this subset read identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from blockgraph.errors import InvalidModel, ParseError
from blockgraph.model import (
    IDENTIFIER,
    Block,
    Model,
    PortRef,
    RawConnection,
    Subsystem,
    System,
    make_block,
    make_subsystem,
    validate,
)

SECTIONS = frozenset({"System", "Block", "Line", "Branch"})


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int


@dataclass(frozen=True)
class _Token:
    kind: str  # "{", "}", "word", "string", "eof"
    text: str
    line: int
    column: int


@dataclass
class _Section:
    name: str
    line: int
    column: int
    entries: list  # of _Section | tuple[str, _Token, int, int]


def _tokens(text: str) -> Iterator[_Token]:
    i, n = 0, len(text)
    line, col = 1, 1

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in text[i : i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while True:
        while i < n:
            ch = text[i]
            if ch in " \t\r\n\f\v":
                advance(1)
            elif ch == "#":
                j = text.find("\n", i)
                advance((n if j < 0 else j) - i)
            else:
                break
        if i >= n:
            yield _Token("eof", "", line, col)
            return
        ch = text[i]
        start_line, start_col = line, col
        if ch in "{}":
            advance(1)
            yield _Token(ch, ch, start_line, start_col)
        elif ch == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string", start_line, start_col)
                c = text[j]
                if c == '"':
                    break
                if c == "\\" and j + 1 < n and text[j + 1] in '"\\':
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(c)
                    j += 1
            advance(j + 1 - i)
            yield _Token("string", "".join(buf), start_line, start_col)
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n\f\v{}"#':
                j += 1
            word = text[i:j]
            advance(j - i)
            yield _Token("word", word, start_line, start_col)


class _Reader:
    def __init__(self, text: str) -> None:
        self._it = _tokens(text)
        self.tok = next(self._it)

    def take(self) -> _Token:
        tok = self.tok
        if tok.kind != "eof":
            self.tok = next(self._it)
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        if self.tok.kind != kind:
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            raise ParseError(f"expected {what}, found {found}", self.tok.line, self.tok.column)
        return self.take()

    def section_body(self, name: str, line: int, column: int) -> _Section:
        sec = _Section(name, line, column, [])
        self.expect("{", "'{'")
        while self.tok.kind != "}":
            key = self.tok
            if key.kind != "word":
                found = "end of input" if key.kind == "eof" else repr(key.text)
                raise ParseError(f"expected key or '}}', found {found}", key.line, key.column)
            if not IDENTIFIER.match(key.text):
                raise ParseError(f"invalid key {key.text!r}", key.line, key.column)
            self.take()
            if self.tok.kind == "{":
                if key.text not in SECTIONS:
                    raise ParseError(f"unknown section {key.text!r}", key.line, key.column)
                sec.entries.append(self.section_body(key.text, key.line, key.column))
            elif self.tok.kind in ("word", "string"):
                sec.entries.append((key.text, self.take(), key.line, key.column))
            else:
                found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
                raise ParseError(f"expected value for {key.text!r}, found {found}", self.tok.line, self.tok.column)
        self.take()
        return sec


def parse(text: str | bytes) -> Model:
    """Parse model text into a :class:`~blockgraph.model.Model`.

    Raises :class:`ParseError` on any malformed input. Duplicate names and
    dangling line endpoints are not parse errors; :func:`validate` reports them.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            before = bytes(text[: exc.start]).decode("utf-8", errors="replace")
            raise ParseError("input is not valid UTF-8", before.count("\n") + 1, len(before.rsplit("\n", 1)[-1]) + 1)
    try:
        reader = _Reader(text)
        head = reader.expect("word", "'Model'")
        if head.text != "Model":
            raise ParseError(f"expected 'Model', found {head.text!r}", head.line, head.column)
        doc = reader.section_body("Model", head.line, head.column)
        reader.expect("eof", "end of input")
    except RecursionError:
        raise ParseError("sections nested too deeply", 1, 1) from None
    return _build_model(doc)


def _values(sec: _Section, reserved: frozenset[str] = frozenset()) -> dict[str, str]:
    out: dict[str, str] = {}
    for entry in sec.entries:
        if isinstance(entry, tuple) and entry[0] not in reserved:
            key, tok, line, col = entry
            if key in out:
                raise ParseError(f"duplicate key {key!r}", line, col)
            out[key] = tok.text
    return out


def _subsections(sec: _Section, allowed: frozenset[str]) -> list[_Section]:
    subs = [e for e in sec.entries if isinstance(e, _Section)]
    for s in subs:
        if s.name not in allowed:
            raise ParseError(f"section {s.name!r} not allowed inside {sec.name!r}", s.line, s.column)
    return subs


def _build_model(doc: _Section) -> Model:
    meta = _values(doc)
    name = meta.pop("Name", "")
    systems = _subsections(doc, frozenset({"System"}))
    if len(systems) != 1:
        raise ParseError("Model must contain exactly one System section", doc.line, doc.column)
    return Model(name=name, root=_build_system(systems[0]), meta=meta)


def _build_system(sec: _Section) -> System:
    params = _values(sec)
    blocks, lines = [], []
    for sub in _subsections(sec, frozenset({"Block", "Line"})):
        if sub.name == "Block":
            blocks.append(_build_block(sub))
        else:
            lines.append(_build_line(sub))
    return System(blocks=tuple(blocks), connections=tuple(lines), parameters=params)


def _build_block(sec: _Section) -> Block:
    params = _values(sec)
    if "BlockType" not in params:
        raise ParseError("Block without BlockType", sec.line, sec.column)
    if "Name" not in params:
        raise ParseError("Block without Name", sec.line, sec.column)
    block_type = params.pop("BlockType")
    name = params.pop("Name")
    inner = _subsections(sec, frozenset({"System"}))
    try:
        if block_type == "SubSystem":
            if len(inner) != 1:
                raise ParseError("SubSystem block must contain exactly one System section", sec.line, sec.column)
            flag = params.pop("Virtual", "on")
            if flag not in ("on", "off"):
                raise ParseError(f"Virtual must be 'on' or 'off', not {flag!r}", sec.line, sec.column)
            return make_subsystem(name, _build_system(inner[0]), params, virtual=flag == "on")
        if inner:
            raise ParseError(f"{block_type} block cannot contain a System", inner[0].line, inner[0].column)
        return make_block(name, block_type, params)
    except ValueError as exc:
        raise ParseError(str(exc), sec.line, sec.column) from None


def _port(tok: _Token, line: int, col: int) -> int:
    if not tok.text.isdigit() or not tok.text.isascii() or int(tok.text) < 1:
        raise ParseError(f"port must be a positive decimal integer, not {tok.text!r}", line, col)
    return int(tok.text)


def _build_line(sec: _Section) -> RawConnection:
    params: dict[str, str] = {}
    src_block = None
    src_port = 1
    dsts: list[PortRef] = []
    _collect_dsts(sec, dsts, params, top=True)
    for entry in sec.entries:
        if isinstance(entry, tuple):
            key, tok, line, col = entry
            if key == "SrcBlock":
                src_block = tok.text
            elif key == "SrcPort":
                src_port = _port(tok, line, col)
    if src_block is None:
        raise ParseError("Line without SrcBlock", sec.line, sec.column)
    if not dsts:
        raise ParseError("Line without any destination", sec.line, sec.column)
    return RawConnection(PortRef(src_block, src_port), tuple(dsts), params)


def _collect_dsts(sec: _Section, dsts: list[PortRef], params: dict[str, str], top: bool) -> None:
    dst_block = None
    dst_port = None
    seen: set[str] = set()
    slot = len(dsts)
    for entry in sec.entries:
        if isinstance(entry, _Section):
            if entry.name != "Branch":
                raise ParseError(f"section {entry.name!r} not allowed inside {sec.name!r}", entry.line, entry.column)
            _collect_dsts(entry, dsts, params, top=False)
            continue
        key, tok, line, col = entry
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", line, col)
        seen.add(key)
        if key == "DstBlock":
            dst_block = tok.text
            slot = len(dsts)
        elif key == "DstPort":
            dst_port = _port(tok, line, col)
        elif top and key in ("SrcBlock", "SrcPort"):
            continue
        elif top:
            params[key] = tok.text
        else:
            raise ParseError(f"unexpected key {key!r} in Branch", line, col)
    if dst_block is not None:
        dsts.insert(slot, PortRef(dst_block, dst_port or 1))
    elif dst_port is not None:
        raise ParseError("DstPort without DstBlock", sec.line, sec.column)


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize(model: Model) -> str:
    """Write ``model`` in canonical form.

    Two-space indentation, one key per line; inside each section the name
    comes first, then parameters in insertion order, nested systems, and
    lines last. Raises :class:`InvalidModel` if the model does not validate.
    """
    violations = validate(model)
    if violations:
        raise InvalidModel(violations)
    out: list[str] = ["Model {"]
    out.append(f"  Name {_quote(model.name)}")
    for k, v in model.meta.items():
        out.append(f"  {k} {_quote(v)}")
    _emit_system(model.root, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"


def _emit_system(system: System, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    inner = pad + "  "
    out.append(f"{pad}System {{")
    for k, v in system.parameters.items():
        out.append(f"{inner}{k} {_quote(v)}")
    for b in system.blocks:
        out.append(f"{inner}Block {{")
        body = inner + "  "
        out.append(f"{body}BlockType {b.block_type}")
        out.append(f"{body}Name {_quote(b.name)}")
        if isinstance(b, Subsystem) and not b.virtual:
            out.append(f"{body}Virtual off")
        for k, v in b.parameters.items():
            out.append(f"{body}{k} {_quote(v)}")
        if isinstance(b, Subsystem):
            _emit_system(b.system, depth + 2, out)
        out.append(f"{inner}}}")
    for conn in system.connections:
        body = inner + "  "
        first, *rest = conn.dsts
        out.append(f"{inner}Line {{")
        out.append(f"{body}SrcBlock {_quote(conn.src.block)}")
        out.append(f"{body}SrcPort {conn.src.port}")
        out.append(f"{body}DstBlock {_quote(first.block)}")
        out.append(f"{body}DstPort {first.port}")
        for k, v in conn.parameters.items():
            out.append(f"{body}{k} {_quote(v)}")
        for dst in rest:
            out.append(f"{body}Branch {{")
            out.append(f"{body}  DstBlock {_quote(dst.block)}")
            out.append(f"{body}  DstPort {dst.port}")
            out.append(f"{body}}}")
        out.append(f"{inner}}}")
    out.append(f"{pad}}}")


def load(path) -> Model:
    with open(path, "rb") as fh:
        return parse(fh.read())


def dump(model: Model, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(model))

"""Text format for substitution rules.

::

    # comment
    rule gain_to_product {
      match { type "Gain" }
      replace {
        block Product param Inputs "2";
        block Constant param Value from-param Gain default "1";
        connect Constant 1 -> Product 2;
        map in 1 -> Product 1;
        map out 1 -> Product out 1;
      }
    }

Grammar (``;`` is optional, whitespace and newlines are insignificant)::

    file      := rule*
    rule      := "rule" [name] "{" match replace "}"
    match     := "match" "{" ( "type" value | "param" key value )* "}"
    replace   := "replace" "{" stmt* "}"
    stmt      := "block" type ["as" name] ( "param" key ( value | "from-param" key ["default" value] ) )*
               | "connect" name int "->" name int
               | "map" "in" int "->" name int
               | "map" "out" int "->" name ["out"] int

``name``, ``type`` and ``key`` are identifiers; ``value`` is a quoted string
or a bare identifier/number. A template block is referred to by its ``as``
name, defaulting to its type.
"""

from __future__ import annotations

import re
from importlib import resources

from blockgraph.errors import ParseError
from blockgraph.transforms.substitute import ParamTransfer, SubstitutionRule, TemplateBlock

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<arrow>->)
  | (?P<punct>[{};])
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z_][A-Za-z0-9_]*)*|[+-]?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "string":
            value = re.sub(r"\\(.)", r"\1", value[1:-1])
        if kind != "ws":
            out.append((kind if kind != "punct" else value, value, line, col))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    out.append(("eof", "", line, pos - line_start + 1))
    return out


class _RuleParser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, what: str):
        kind, value, line, col = self.tok
        found = "end of input" if kind == "eof" else repr(value)
        raise ParseError(f"expected {what}, found {found}", line, col)

    def take(self, kind: str, what: str | None = None, value: str | None = None) -> str:
        k, v, _, _ = self.tok
        if k != kind or (value is not None and v != value):
            self.fail(what or repr(value or kind))
        self.i += 1
        return v

    def at(self, kind: str, value: str | None = None) -> bool:
        k, v, _, _ = self.tok
        return k == kind and (value is None or v == value)

    def word(self, value: str) -> bool:
        if self.at("word", value):
            self.i += 1
            return True
        return False

    def value(self) -> str:
        if self.at("string") or self.at("word"):
            v = self.tok[1]
            self.i += 1
            return v
        self.fail("a value")

    def integer(self) -> int:
        v = self.take("word", "an integer")
        if not v.isdigit():
            self.i -= 1
            self.fail("an integer")
        return int(v)

    def semi(self) -> None:
        if self.at(";"):
            self.i += 1

    def rules(self) -> list[SubstitutionRule]:
        out = []
        while not self.at("eof"):
            out.append(self.rule(len(out) + 1))
        return out

    def rule(self, ordinal: int) -> SubstitutionRule:
        self.take("word", "'rule'", "rule")
        name = f"rule{ordinal}"
        if self.at("word") or self.at("string"):
            name = self.value()
        self.take("{", "'{'")
        self.take("word", "'match'", "match")
        self.take("{", "'{'")
        match_type = None
        match_params: dict[str, str] = {}
        while not self.at("}"):
            if self.word("type"):
                match_type = self.value()
            elif self.word("param"):
                key = self.take("word", "a parameter name")
                match_params[key] = self.value()
            else:
                self.fail("'type', 'param' or '}'")
            self.semi()
        self.take("}")
        if match_type is None:
            self.fail("a 'type' clause in match")
        self.take("word", "'replace'", "replace")
        self.take("{", "'{'")
        blocks: list[TemplateBlock] = []
        conns: list[tuple[str, int, str, int]] = []
        inputs: dict[int, tuple[str, int]] = {}
        outputs: dict[int, tuple[str, int]] = {}
        while not self.at("}"):
            line, col = self.tok[2], self.tok[3]
            if self.word("block"):
                blocks.append(self.block())
            elif self.word("connect"):
                s = self.take("word", "a template block name")
                sp = self.integer()
                self.take("arrow", "'->'")
                d = self.take("word", "a template block name")
                conns.append((s, sp, d, self.integer()))
            elif self.word("map"):
                if self.word("in"):
                    k = self.integer()
                    self.take("arrow", "'->'")
                    target = (self.take("word", "a template block name"), self.integer())
                    table = inputs
                elif self.word("out"):
                    k = self.integer()
                    self.take("arrow", "'->'")
                    tname = self.take("word", "a template block name")
                    self.word("out")
                    target = (tname, self.integer())
                    table = outputs
                else:
                    self.fail("'in' or 'out'")
                if k in table:
                    raise ParseError(f"port {k} mapped twice", line, col)
                table[k] = target
            else:
                self.fail("'block', 'connect', 'map' or '}'")
            self.semi()
        self.take("}")
        self.take("}", "'}' closing the rule")
        return SubstitutionRule(name, match_type, tuple(blocks), inputs, outputs, tuple(conns), match_params)

    def block(self) -> TemplateBlock:
        block_type = self.take("word", "a block type")
        name = block_type
        if self.word("as"):
            name = self.take("word", "a template block name")
        params: dict[str, str] = {}
        transfers = []
        while self.word("param"):
            key = self.take("word", "a parameter name")
            if self.word("from-param"):
                source = self.take("word", "a parameter name")
                default = self.value() if self.word("default") else None
                transfers.append(ParamTransfer(key, source, default))
            else:
                params[key] = self.value()
        return TemplateBlock(name, block_type, params, tuple(transfers))


def parse_rules(text: str) -> list[SubstitutionRule]:
    """Parse rules text; each rule is checked for well-formedness."""
    rules = _RuleParser(text).rules()
    for r in rules:
        r.check()
    return rules


def load_rules(path) -> list[SubstitutionRule]:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


def builtin_rules(name: str = "gain") -> list[SubstitutionRule]:
    """Rules shipped with the package, e.g. ``"gain"`` (Gain -> Product x Constant)."""
    text = resources.files("blockgraph").joinpath("rules", f"{name}.rules").read_text(encoding="utf-8")
    return parse_rules(text)

"""Domain model of a block diagram: systems, blocks, subsystems and lines.

All classes are frozen dataclasses. Parameter maps are plain dicts kept in
insertion order; treat them as read-only and build modified copies with
:func:`dataclasses.replace`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# Keys with structural meaning inside a Block section; never stored as parameters.
RESERVED_BLOCK_KEYS = frozenset({"BlockType", "Name", "System"})

# (inputs, outputs); ``None`` inputs means "read from the Inputs parameter".
PORT_TABLE: dict[str, tuple[int | None, int]] = {
    "Gain": (1, 1),
    "Sum": (None, 1),
    "Product": (None, 1),
    "Constant": (0, 1),
    "UnitDelay": (1, 1),
    "Inport": (0, 1),
    "Outport": (1, 0),
    "Terminator": (1, 0),
}
DEFAULT_PORTS = (1, 1)


@dataclass(frozen=True, order=True)
class PortRef:
    block: str
    port: int = 1

    def __str__(self) -> str:
        return f"{self.block}:{self.port}"


@dataclass(frozen=True)
class RawConnection:
    """A line from one output port to one or more input ports.

    More than one destination makes it a branched (1:n) line.
    """

    src: PortRef
    dsts: tuple[PortRef, ...]
    parameters: dict[str, str] = field(default_factory=dict)

    @property
    def branched(self) -> bool:
        return len(self.dsts) > 1


@dataclass(frozen=True, kw_only=True)
class Block:
    name: str
    parameters: dict[str, str] = field(default_factory=dict)
    in_ports: int = 1
    out_ports: int = 1

    @property
    def block_type(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True, kw_only=True)
class SimpleBlock(Block):
    type: str

    @property
    def block_type(self) -> str:
        return self.type


@dataclass(frozen=True, kw_only=True)
class Subsystem(Block):
    system: "System"
    virtual: bool = True

    @property
    def block_type(self) -> str:
        return "SubSystem"


@dataclass(frozen=True)
class System:
    blocks: tuple[Block, ...] = ()
    connections: tuple[RawConnection, ...] = ()
    parameters: dict[str, str] = field(default_factory=dict)

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def port_blocks(self, block_type: str) -> list[SimpleBlock]:
        """Inport or Outport blocks of this system ordered by port number."""
        found = [b for b in self.blocks if b.block_type == block_type]
        return [b for _, b in sorted(zip(port_numbers(found), found), key=lambda t: t[0])]


@dataclass(frozen=True)
class Model:
    name: str
    root: System
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path or '<model>'}: [{self.code}] {self.message}"


def parse_ports_parameter(value: str) -> tuple[int, int]:
    """Parse a ``Ports`` override such as ``[2, 1]`` or ``2,1``."""
    text = value.strip()
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    parts = [p.strip() for p in text.split(",")]
    if len(parts) < 2 or not all(p.isdigit() for p in parts[:2]):
        raise ValueError(f"bad Ports value {value!r}")
    return int(parts[0]), int(parts[1])


def input_signs(parameters: dict[str, str], default: int = 2, ops: str = "+-") -> str:
    """Per-input operator string from an ``Inputs`` parameter (``"3"`` or ``"+-+"``)."""
    raw = parameters.get("Inputs", "").strip()
    if not raw:
        return ops[0] * default
    if raw.isdigit():
        return ops[0] * int(raw)
    signs = raw.replace("|", "")
    if not signs or any(c not in ops for c in signs):
        raise ValueError(f"bad Inputs value {raw!r}")
    return signs


def default_ports(block_type: str, parameters: dict[str, str]) -> tuple[int, int]:
    if "Ports" in parameters:
        return parse_ports_parameter(parameters["Ports"])
    n_in, n_out = PORT_TABLE.get(block_type, DEFAULT_PORTS)
    if n_in is None:
        n_in = len(input_signs(parameters, ops="+-" if block_type == "Sum" else "*/"))
    return n_in, n_out


def port_numbers(blocks) -> list[int]:
    """Port index of each Inport/Outport: its ``Port`` parameter, else 1-based order."""
    out = []
    for i, b in enumerate(blocks, start=1):
        raw = b.parameters.get("Port", "").strip()
        out.append(int(raw) if raw.isdigit() else i)
    return out


def make_block(name: str, block_type: str, parameters: dict[str, str] | None = None) -> SimpleBlock:
    """Build a simple block with port counts taken from the built-in type table."""
    params = dict(parameters or {})
    n_in, n_out = default_ports(block_type, params)
    return SimpleBlock(name=name, type=block_type, parameters=params, in_ports=n_in, out_ports=n_out)


def make_subsystem(
    name: str,
    system: System,
    parameters: dict[str, str] | None = None,
    virtual: bool = True,
) -> Subsystem:
    params = dict(parameters or {})
    if "Ports" in params:
        n_in, n_out = parse_ports_parameter(params["Ports"])
    else:
        n_in = sum(1 for b in system.blocks if b.block_type == "Inport")
        n_out = sum(1 for b in system.blocks if b.block_type == "Outport")
    return Subsystem(
        name=name, parameters=params, system=system, virtual=virtual, in_ports=n_in, out_ports=n_out
    )


def validate(model: Model) -> list[Violation]:
    """Check every structural invariant of ``model``.

    Returns an empty list iff the model is valid. Violations are reported in
    document order; the function has no side effects.
    """
    out: list[Violation] = []
    if not model.name:
        out.append(Violation("EmptyName", "", "model name is empty"))
    for key in model.meta:
        if not IDENTIFIER.match(key) or key in ("Name", "System"):
            out.append(Violation("BadKey", "", f"model key {key!r} is not a usable identifier"))
    _validate_system(model.root, "", out)
    return out


def _validate_system(system: System, prefix: str, out: list[Violation]) -> None:
    where = prefix or "<root>"
    for key in system.parameters:
        if not IDENTIFIER.match(key) or key == "Block":
            out.append(Violation("BadKey", where, f"system key {key!r} is not a usable identifier"))

    by_name: dict[str, Block] = {}
    for b in system.blocks:
        path = f"{prefix}/{b.name}" if prefix else b.name
        if not b.name:
            out.append(Violation("EmptyName", path, "block name is empty"))
        if b.name in by_name:
            out.append(Violation("DuplicateName", path, f"block name {b.name!r} used twice"))
        else:
            by_name[b.name] = b
        _validate_block(b, path, out)

    for conn in system.connections:
        if not conn.dsts:
            out.append(Violation("EmptyLine", where, f"line from {conn.src} has no destination"))
        for key in conn.parameters:
            if not IDENTIFIER.match(key) or key in _LINE_KEYS:
                out.append(Violation("BadKey", where, f"line key {key!r} is not a usable identifier"))
        src = by_name.get(conn.src.block)
        if src is None:
            out.append(Violation("DanglingEndpoint", where, f"line source names absent block {conn.src.block!r}"))
        elif not 1 <= conn.src.port <= src.out_ports:
            out.append(
                Violation("PortOutOfRange", where, f"source port {conn.src} exceeds {src.out_ports} outputs")
            )
        for dst in conn.dsts:
            blk = by_name.get(dst.block)
            if blk is None:
                out.append(Violation("DanglingEndpoint", where, f"line destination names absent block {dst.block!r}"))
            elif not 1 <= dst.port <= blk.in_ports:
                out.append(
                    Violation("PortOutOfRange", where, f"destination port {dst} exceeds {blk.in_ports} inputs")
                )

    for kind in ("Inport", "Outport"):
        ports = [b for b in system.blocks if b.block_type == kind]
        numbers = port_numbers(ports)
        if sorted(numbers) != list(range(1, len(ports) + 1)):
            out.append(Violation("PortNumbering", where, f"{kind} numbers {sorted(numbers)} are not 1..{len(ports)}"))


_LINE_KEYS = frozenset({"SrcBlock", "SrcPort", "DstBlock", "DstPort", "Branch"})


def _validate_block(b: Block, path: str, out: list[Violation]) -> None:
    for key in b.parameters:
        if not IDENTIFIER.match(key) or key in RESERVED_BLOCK_KEYS:
            out.append(Violation("BadKey", path, f"parameter key {key!r} is not a usable identifier"))
    if b.in_ports < 0 or b.out_ports < 0:
        out.append(Violation("BadPortCount", path, "negative port count"))
    if isinstance(b, SimpleBlock):
        if not IDENTIFIER.match(b.type) or b.type == "SubSystem":
            out.append(Violation("BadKey", path, f"block type {b.type!r} is not a usable identifier"))
        if b.type == "Inport" and (b.in_ports, b.out_ports) != (0, 1):
            out.append(Violation("BadPortCount", path, "Inport must have 0 inputs and 1 output"))
        if b.type == "Outport" and (b.in_ports, b.out_ports) != (1, 0):
            out.append(Violation("BadPortCount", path, "Outport must have 1 input and 0 outputs"))
        try:
            expected = default_ports(b.type, b.parameters)
        except ValueError as exc:
            out.append(Violation("BadParameter", path, str(exc)))
        else:
            if expected != (b.in_ports, b.out_ports):
                out.append(
                    Violation(
                        "BadPortCount",
                        path,
                        f"port counts {(b.in_ports, b.out_ports)} disagree with type/parameters {expected}",
                    )
                )
    elif isinstance(b, Subsystem):
        if "Virtual" in b.parameters:
            out.append(Violation("BadKey", path, "subsystem virtual flag must not be a parameter"))
        n_in = sum(1 for x in b.system.blocks if x.block_type == "Inport")
        n_out = sum(1 for x in b.system.blocks if x.block_type == "Outport")
        if (b.in_ports, b.out_ports) != (n_in, n_out):
            out.append(
                Violation(
                    "PortMismatch",
                    path,
                    f"subsystem declares {(b.in_ports, b.out_ports)} ports but holds {n_in} Inports/{n_out} Outports",
                )
            )
        _validate_system(b.system, path, out)
    else:
        out.append(Violation("BadBlock", path, f"unknown block class {type(b).__name__}"))

"""Exception hierarchy shared by the parser, graph core, analyses and transforms."""

from __future__ import annotations


class BlockGraphError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(BlockGraphError):
    """Malformed model or rules text.

    Carries the 1-based ``line``/``column`` of the offending token.
    """

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column

    @property
    def span(self):
        from blockgraph.mdl import SourceSpan

        return SourceSpan(self.line, self.column)


class InvalidModel(BlockGraphError):
    """A model failed validation where a valid one is required."""

    def __init__(self, violations) -> None:
        self.violations = list(violations)
        shown = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"invalid model: {shown}{more}")


class InconsistentGraph(BlockGraphError):
    pass


class CycleError(BlockGraphError):
    """An operation that needs an acyclic graph level was given a cyclic one."""


class WeightParseError(BlockGraphError):
    def __init__(self, block: str, message: str) -> None:
        super().__init__(f"block {block!r}: {message}")
        self.block = block


class PortMismatch(BlockGraphError):
    pass


class PortMappingError(BlockGraphError):
    pass


class RuleError(BlockGraphError):
    """A substitution rule is not well formed."""


class EvalError(BlockGraphError):
    pass


class UnsupportedBlock(EvalError):
    pass


class UnresolvableCycle(EvalError):
    pass


class BadParameter(EvalError):
    pass

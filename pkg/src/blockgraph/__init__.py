"""Graph representation, analysis and transformation of textual block-diagram models."""

from blockgraph.errors import (
    BadParameter,
    BlockGraphError,
    CycleError,
    EvalError,
    InconsistentGraph,
    InvalidModel,
    ParseError,
    PortMappingError,
    PortMismatch,
    RuleError,
    UnresolvableCycle,
    UnsupportedBlock,
    WeightParseError,
)
from blockgraph.evaluate import Trace, evaluate
from blockgraph.graph import (
    Edge,
    GraphBuilder,
    ModelGraph,
    Node,
    build_graph,
    inventory,
    is_acyclic,
    to_model,
    topological_order,
)
from blockgraph.mdl import SourceSpan, dump, load, parse, serialize
from blockgraph.model import (
    Block,
    Model,
    PortRef,
    RawConnection,
    SimpleBlock,
    Subsystem,
    System,
    Violation,
    make_block,
    make_subsystem,
    validate,
)
from blockgraph.visitor import Order, Visitor, run_visitor

__version__ = "0.1.0"

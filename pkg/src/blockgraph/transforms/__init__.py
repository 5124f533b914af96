"""Graph-to-graph transformations; inputs are never modified."""

from blockgraph.transforms.breaking import RemovedEdge, break_cycles, feedback_edges
from blockgraph.transforms.changelog import Change, ChangeLog, replay
from blockgraph.transforms.flatten import SemanticsWarning, flatten_hierarchy
from blockgraph.transforms.normalize import normalize_connections
from blockgraph.transforms.rules import builtin_rules, load_rules, parse_rules
from blockgraph.transforms.substitute import ParamTransfer, SubstitutionRule, TemplateBlock, substitute

__all__ = [
    "Change",
    "ChangeLog",
    "ParamTransfer",
    "RemovedEdge",
    "SemanticsWarning",
    "SubstitutionRule",
    "TemplateBlock",
    "break_cycles",
    "builtin_rules",
    "feedback_edges",
    "flatten_hierarchy",
    "load_rules",
    "normalize_connections",
    "parse_rules",
    "replay",
    "substitute",
]

"""Read-only analyses over a :class:`~blockgraph.graph.ModelGraph` level."""

from blockgraph.analyses.clones import CloneGroup, detect_clones, find_clones
from blockgraph.analyses.cycles import Cycle, detect_cycles
from blockgraph.analyses.paths import (
    BlockCount,
    ParallelPathGroup,
    Path,
    all_simple_paths,
    count_blocks_on_paths,
    enumerate_paths,
    find_parallel_paths,
)
from blockgraph.analyses.wcet import (
    WeightedPathResult,
    block_weight,
    format_user_data,
    longest_weighted_path,
    parse_user_data,
)

__all__ = [
    "BlockCount",
    "CloneGroup",
    "Cycle",
    "ParallelPathGroup",
    "Path",
    "WeightedPathResult",
    "all_simple_paths",
    "block_weight",
    "count_blocks_on_paths",
    "detect_clones",
    "detect_cycles",
    "enumerate_paths",
    "find_clones",
    "find_parallel_paths",
    "format_user_data",
    "longest_weighted_path",
    "parse_user_data",
]

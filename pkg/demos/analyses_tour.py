# %% [markdown]
# # Analyses on a small block diagram
#
# Load a model from text, build its graph, then ask it questions: which
# signal paths leave a fan-out block, which of them run in parallel, how
# many Gain blocks each one crosses, and how long the slowest chain takes.

# %%
from pathlib import Path

from blockgraph import build_graph, load, parse
from blockgraph.analyses import (
    count_blocks_on_paths,
    detect_clones,
    detect_cycles,
    enumerate_paths,
    find_parallel_paths,
    longest_weighted_path,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

model = load(FIXTURES / "seven_paths.bdm")
graph = build_graph(model)
print(len(graph), "blocks,", len(graph.edges), "edges")

# %% [markdown]
# Paths run from a block with several outgoing edges to a block with
# several incoming ones. Blocks in between have exactly one of each.

# %%
for p in enumerate_paths(graph):
    print(" -> ".join(graph.nodes[v].name for v in p.nodes))

# %%
for group in find_parallel_paths(graph):
    print(graph.nodes[group.start].name, "=>", graph.nodes[group.end].name, len(group.paths), "paths")

# %% [markdown]
# Counting Gain blocks per branch shows whether the branches are balanced.
# Here one branch goes through a UnitDelay instead, so they are not.

# %%
a, d = graph.name_index["A"], graph.name_index["D"]
res = count_blocks_on_paths(graph, a, d, "Gain")
for p, k in res.paths:
    print(k, [graph.nodes[v].name for v in p.nodes])
print("balanced:", res.balanced)

# %% [markdown]
# Execution times come from each block's `UserData`, e.g. `wcet=2;mem=16`.

# %%
diamond = build_graph(load(FIXTURES / "diamond.bdm"))
w = longest_weighted_path(diamond, "wcet", 0)
print(w.total_weight, [diamond.nodes[v].name for v in w.path])

# %% [markdown]
# Cycles and clones work on the same graph type. A delay loop is one cycle.
# Two copies of a Constant -> Gain -> Terminator chain form one clone group.

# %%
loop = build_graph(load(FIXTURES / "feedback.bdm"))
print([[loop.nodes[v].name for v in c.nodes] for c in detect_cycles(loop)])

clones = build_graph(load(FIXTURES / "clones.bdm"))
for g in detect_clones(clones, min_size=2):
    print(g.size, g.names)

# %% [markdown]
# Models can also come straight from a string.

# %%
tiny = parse('Model { Name "m" System { Block { BlockType Constant Name "c" Value "1" } } }')
print(tiny.name, [b.name for b in tiny.root.blocks])

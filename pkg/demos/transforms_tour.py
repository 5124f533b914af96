# %% [markdown]
# # Transformations and the evaluator
#
# Each transform returns a new graph plus a change log and leaves its
# input alone. The evaluator runs both versions so we can compare traces.

# %%
from pathlib import Path

from blockgraph import build_graph, evaluate, load, serialize, to_model
from blockgraph.graph import inventory
from blockgraph.transforms import (
    break_cycles,
    builtin_rules,
    flatten_hierarchy,
    normalize_connections,
    replay,
    substitute,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

# %% [markdown]
# ## Splitting branched lines
#
# One line from `src` feeds two blocks. After normalizing, each destination
# gets its own line. The endpoints stay the same.

# %%
m = load(FIXTURES / "branched.bdm")
g = build_graph(m)
out, log = normalize_connections(g)
for c in log:
    print(c.kind, c.subject)
print(serialize(to_model(out, m, regroup=False)))

# %% [markdown]
# ## Replacing Gain with Product and Constant

# %%
m = load(FIXTURES / "gain.bdm")
g = build_graph(m)
out, log = substitute(g, builtin_rules("gain")[0])
print([(n.name, n.block_type) for n in out.nodes])
print(evaluate(g, {"u": [1, 2]}, 2).values, evaluate(out, {"u": [1, 2]}, 2).values)

# %% [markdown]
# The log replays onto the input's block and edge inventory and gives the
# output's inventory.

# %%
print(replay(g, log) == inventory(out))

# %% [markdown]
# ## Flattening
#
# Virtual subsystems dissolve into their parent. Atomic ones stay unless
# asked, because inlining them may change execution order.

# %%
m = load(FIXTURES / "hierarchy.bdm")
g = build_graph(m)
flat, _ = flatten_hierarchy(g)
print([n.name for n in flat.nodes])
flat_all, _ = flatten_hierarchy(g, include_atomic=True, warn=False)
print([n.name for n in flat_all.nodes])
print(evaluate(g, {}, 3).values, evaluate(flat_all, {}, 3).values)

# %% [markdown]
# ## Breaking cycles
#
# The smallest set of edges is removed, preferring edges into a UnitDelay.

# %%
g = build_graph(load(FIXTURES / "feedback.bdm"))
_, _, removed = break_cycles(g)
print(removed)

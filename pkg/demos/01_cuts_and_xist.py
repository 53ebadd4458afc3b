# %% [markdown]
# # Balanced cuts on a discretized sample
#
# Points are binned on a grid, each bin becomes a node, and neighbouring
# bins are joined with weight `x_i * x_j`. We compare the exact optimum of
# each balanced cut with the Xist surrogate, which only searches
# st-MinCuts between local maxima.

# %%
import numpy as np

from cutlimits import (discretize, empirical_graph, min_cut_exact, multiway_min_exact,
                       named_distribution, population_graph, st_mincut, xist)

grid = named_distribution("bimodal3x3", eps=0.4)
print(grid.p.reshape(grid.shape).round(4))

# %% [markdown]
# A sample of 5000 points: draw a bin for each point, jitter it inside the
# bin, then discretize back to counts.

# %%
rng = np.random.default_rng(1)
bins = rng.choice(grid.m, size=5000, p=grid.p)
pts = grid.centers[bins] + rng.uniform(-0.45, 0.45, size=(5000, 2))
sample = discretize(pts, grid)
print(sample.counts.reshape(grid.shape))

# %%
g_pop = population_graph(grid, 1)
g_emp = empirical_graph(sample, grid, 1)
for kind in ("mcut", "rcut", "ncut", "ccut"):
    exact = min_cut_exact(g_emp, kind)
    fast = xist(g_emp, sample.counts, kind)
    print(f"{kind:5s} exact {exact.value:.6g} {exact.best}   xist {fast.value:.6g} "
          f"{fast.partition}  pairs={fast.computed_pairs}")

# %% [markdown]
# The st-MinCut between the two heaviest corners, and a three-way NCut.

# %%
cut = st_mincut(g_pop, 0, 8)
print(cut.value, cut.source_side)
three = multiway_min_exact(g_pop, 3, "ncut")
print(three.value, [mp.blocks for mp in three.minimizers])

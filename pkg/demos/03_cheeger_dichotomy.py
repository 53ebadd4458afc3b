# %% [markdown]
# # Cheeger cuts with equal volumes
#
# When the optimal Cheeger partition splits the volume evenly, the smaller
# side is itself random and the limit is a mixture rather than a Gaussian.
# The top row weight below is chosen to make the two volumes equal.

# %%
import numpy as np

from cutlimits import (ks_distance, limit_sampler, mc_statistic, min_cut_exact,
                       named_distribution, population_graph)
from cutlimits.asymptotics import volumes_tie

grid = named_distribution("bimodal3x3", eps=0.4)
g = population_graph(grid, 1)
rep = min_cut_exact(g, "ccut")
print(rep.best, "equal volumes:", volumes_tie(g, rep.best))

# %%
mixture = limit_sampler("ccut", g, rep, 100_000, seed=1)
gaussian = limit_sampler("ccut", g, rep, 100_000, seed=2, ccut_side="fixed")
emp = mc_statistic(grid, 1, "ccut", "xc_min", n=10_000, R=3_000, seed=3).values
for name, ref in (("mixture", mixture), ("gaussian", gaussian)):
    print(f"{name:9s} mean {ref.mean():+.4f}  KS to simulation {ks_distance(emp, ref):.4f}")
print("simulation mean", round(float(np.mean(emp)), 4))

# %% [markdown]
# # Bootstrap of the optimal cut value
#
# Resampling `M` counts from the observed frequencies. With `M = n` the
# bootstrap inherits the non-smoothness of the minimum and misses the limit;
# `M = ceil(sqrt(n))` recovers it as `n` grows.

# %%
import numpy as np

from cutlimits import (BootstrapConfig, DiscretizedSample, bootstrap_distribution, ks_distance,
                       limit_sampler, min_cut_exact, named_distribution, population_graph)

grid = named_distribution("bimodal3x3", eps=0.4)
g = population_graph(grid, 1)
limit = limit_sampler("ccut", g, min_cut_exact(g, "ccut"), 100_000, seed=0)

# %%
for n in (1_000, 10_000, 100_000):
    y = np.random.default_rng(n).multinomial(n, grid.p)
    sample = DiscretizedSample(y, n)
    row = []
    for rule in ("sqrt_n", "equal_n"):
        draws = bootstrap_distribution(sample, grid, 1, "ccut", BootstrapConfig(rule, B=400, seed=5))
        row.append(f"{rule} KS {ks_distance(draws, limit):.3f}")
    print(f"n={n:>6d}  " + "   ".join(row))

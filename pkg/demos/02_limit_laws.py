# %% [markdown]
# # Limit laws of optimal cut values
#
# `sqrt(n) (XC(G_n) - XC(G))` converges to the minimum of Gaussians indexed
# by the optimal partitions. Here we set the closed-form variance against a
# Monte Carlo ensemble and print a QQ table.

# %%
import numpy as np

from cutlimits import (covariance, ks_distance, limit_sampler, mc_statistic, min_cut_exact,
                       named_distribution, population_graph, qq_data)

grid = named_distribution("bimodal3x3", eps=0.4)
g = population_graph(grid, 1)

# %%
for kind in ("mcut", "rcut", "ncut", "ncutalt"):
    S = min_cut_exact(g, kind).minimizers[0]
    theory = covariance(kind, g, [S]).matrix[0, 0]
    ens = mc_statistic(grid, 1, kind, "xc_fixed", n=50_000, R=3_000, seed=2, partition=S)
    print(f"{kind:8s} closed form {theory:.5g}   simulated {ens.values.var():.5g}")

# %% [markdown]
# The optimal value itself, with every tied minimizer taken into account.

# %%
rep = min_cut_exact(g, "ncut")
limit = limit_sampler("ncut", g, rep, 50_000, seed=3)
emp = mc_statistic(grid, 1, "ncut", "xc_min", n=10_000, R=2_000, seed=4).values
print("KS distance", round(ks_distance(emp, limit), 4))
print(np.round(qq_data(emp, limit, n_quantiles=9, lower=0.05, upper=0.95), 3))

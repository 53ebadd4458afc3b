# %% [markdown]
# # Testing for cluster structure
#
# The optimal NCut of an empirical graph is compared with the acceptance
# band built from the limit law under a uniform distribution. A low-density
# band through the middle of the grid pushes the cut value below the band.

# %%
import numpy as np

from cutlimits import DiscretizedSample, ReferenceLimit, clustering_test, named_distribution

reference = ReferenceLimit.build(named_distribution("uniform", shape=(4, 4)), 1, "ncut",
                                 50_000, seed=0)

# %%
n, runs = 10_000, 100
for eps in (1.0, 0.98, 0.95, 0.9, 0.8):
    grid = named_distribution("band4x4", eps=eps)
    rng = np.random.default_rng(int(eps * 100))
    rejected = sum(clustering_test(DiscretizedSample(rng.multinomial(n, grid.p), n), grid, 1,
                                   "ncut", reference=reference).reject for _ in range(runs))
    print(f"eps={eps:.2f}  rejection rate {rejected / runs:.2f}")

"""Balanced graph cuts on discretized samples and their limiting distributions."""

from .discretization import (DiscretizedSample, ProbabilityGrid, discretize,
                             named_distribution, sample_multinomial)
from .graph import (Partition, WeightedGraph, build_graph, empirical_graph,
                    population_graph, vol, weight_unbiasedness_check)
from .cuts import (CutKind, CutReport, MultiPartition, cut_value, min_cut_exact,
                   multiway_cut_value, multiway_min_exact)
from .maxflow import StCutResult, st_mincut
from .xist import XistResult, local_maxima, xist, xist_vs_exact
from .asymptotics import (AssumptionError, covariance, covariance_ccut_unequal,
                          gaussian_root_sample, limit_sampler, multiway_limit_sampler, q_vector,
                          xist_limit_variance)
from .resampling import BootstrapConfig, McEnsemble, bootstrap_distribution, mc_statistic
from .stats import (ReferenceLimit, clustering_test, kolmogorov_quantile, ks_distance,
                    ks_test, qq_data)

__version__ = "0.1.0"

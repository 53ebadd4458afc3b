import math

import numpy as np
import pytest

from cutlimits import (BootstrapConfig, DiscretizedSample, bootstrap_distribution,
                       build_graph, covariance, mc_statistic, min_cut_exact, named_distribution,
                       population_graph)
from cutlimits.graph import Partition
from cutlimits.resampling import draw_counts
from cutlimits.maxflow import st_partitions


@pytest.fixture
def grid():
    return named_distribution("bimodal3x3", eps=0.4)


def test_workers_do_not_change_results(grid):
    a = mc_statistic(grid, 1, "ncut", "xc_min", n=500, R=64, seed=3, workers=1)
    b = mc_statistic(grid, 1, "ncut", "xc_min", n=500, R=64, seed=3, workers=2)
    assert np.array_equal(a.values, b.values)


def test_replicates_are_prefix_stable(grid):
    a = mc_statistic(grid, 1, "rcut", "xc_min", n=200, R=10, seed=5)
    b = mc_statistic(grid, 1, "rcut", "xc_min", n=200, R=25, seed=5)
    assert np.array_equal(a.values, b.values[:10])


def test_draw_counts_rows_sum_to_n(grid):
    Y = draw_counts(grid.p, 77, 1, 4, 9)
    assert Y.shape == (5, 9) and np.all(Y.sum(axis=1) == 77)
    assert np.array_equal(Y[0], draw_counts(grid.p, 77, 1, 4, 5)[0])


def test_xc_min_matches_loop(grid):
    ens = mc_statistic(grid, 1, "ncut", "xc_min", n=300, R=12, seed=9)
    base = min_cut_exact(population_graph(grid, 1), "ncut").value
    Y = draw_counts(grid.p, 300, 9, 0, 12)
    for r, y in enumerate(Y):
        g = build_graph(y / 300, grid, 1, "empirical", 300)
        ref = math.sqrt(300) * (min_cut_exact(g, "ncut").value - base)
        assert ens.values[r] == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_fixed_partition_close_to_limit(grid):
    S = [0, 1, 2, 3, 4, 5]
    ens = mc_statistic(grid, 1, "mcut", "xc_fixed", n=20_000, R=3000, seed=2, partition=S)
    var = covariance("mcut", population_graph(grid, 1), [S]).matrix[0, 0]
    assert abs(ens.values.mean()) < 4 * math.sqrt(var / 3000) + 0.01
    assert ens.values.var() == pytest.approx(var, rel=0.1)


def test_attainer_codes_are_st_partitions():
    grid = named_distribution("uniform", shape=(2, 2))
    ens = mc_statistic(grid, 1, "mcut", "stmincut_attainer", n=1000, R=200, seed=1, pair=(0, 1))
    allowed = {Partition.of(mk, 4).code for mk in st_partitions(4, 0, 1)} | {-1}
    assert set(ens.values.astype(int)) <= allowed


def test_vloc_count_range():
    grid = named_distribution("uniform", shape=(3, 3))
    ens = mc_statistic(grid, 1, "mcut", "vloc_count", n=100, R=200, seed=4)
    assert ens.values.min() >= 1 and ens.values.max() <= 9


def test_argument_checks(grid):
    with pytest.raises(ValueError, match="statistic"):
        mc_statistic(grid, 1, "ncut", "median", n=10, R=1, seed=0)
    with pytest.raises(ValueError, match="partition"):
        mc_statistic(grid, 1, "ncut", "xc_fixed", n=10, R=1, seed=0)
    with pytest.raises(ValueError, match="pair"):
        mc_statistic(grid, 1, "ncut", "stmincut_attainer", n=10, R=1, seed=0)


@pytest.mark.parametrize("n, expected", [(1, 1), (2, 2), (99, 10), (100, 10), (101, 11),
                                         (10**6, 1000)])
def test_sqrt_rule(n, expected):
    assert BootstrapConfig("sqrt_n").resample_size(n) == expected


def test_config_validation():
    assert BootstrapConfig("equal_n").resample_size(37) == 37
    assert BootstrapConfig("fixed", M=5).resample_size(1000) == 5
    with pytest.raises(ValueError):
        BootstrapConfig("fixed")
    with pytest.raises(ValueError):
        BootstrapConfig("half")
    with pytest.raises(ValueError):
        BootstrapConfig(B=0)


def test_bootstrap_matches_loop(grid):
    n = 400
    y = np.random.default_rng(0).multinomial(n, grid.p)
    sample = DiscretizedSample(y, n)
    cfg = BootstrapConfig("sqrt_n", B=15, seed=6)
    draws = bootstrap_distribution(sample, grid, 1, "rcut", cfg)
    M = cfg.resample_size(n)
    base = min_cut_exact(build_graph(y / n, grid, 1, "empirical", n), "rcut").value
    for b, ystar in enumerate(draw_counts(y / n, M, 6, 0, 15)):
        g = build_graph(ystar / M, grid, 1, "empirical", M)
        assert draws[b] == pytest.approx(math.sqrt(M) * (min_cut_exact(g, "rcut").value - base),
                                         rel=1e-10, abs=1e-12)


def test_bootstrap_resampling_the_sample_itself_can_give_zero():
    grid = named_distribution("uniform", shape=(1, 2))
    sample = DiscretizedSample(np.array([1, 1]), 2)
    draws = bootstrap_distribution(sample, grid, 1, "mcut",
                                   BootstrapConfig("equal_n", B=200, seed=0))
    ystar = draw_counts(np.array([0.5, 0.5]), 2, 0, 0, 200)
    same = np.all(ystar == [1, 1], axis=1)
    assert same.any()
    assert np.all(draws[same] == 0)

import numpy as np
from hypothesis import given, settings, strategies as st

from cutlimits import cut_value, min_cut_exact, st_mincut, xist
from cutlimits.asymptotics import covariance, gaussian_root_sample
from cutlimits.cuts import partition_masks
from cutlimits.graph import Partition, product_graph

from oracles import random_product_graph, st_min_by_enumeration

KINDS = ["mcut", "rcut", "ncut", "ncutalt", "ccut"]
seeds = st.integers(0, 2**32 - 1)


def graph_from(seed, lo=2, hi=7):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(lo, hi + 1))
    x, adj = random_product_graph(rng, m, rng.uniform(0.1, 0.9))
    return product_graph(x, adj)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 10))
def test_partition_codes_enumerate_each_split_once(m):
    masks = partition_masks(m)
    codes = [Partition.of(mk, m).code for mk in masks]
    assert codes == list(range(1, 2 ** (m - 1)))
    assert masks[:, 0].all()


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(KINDS))
def test_minimizers_attain_value_from_either_side(seed, kind):
    g = graph_from(seed)
    rep = min_cut_exact(g, kind)
    for s in rep.minimizers:
        assert np.isclose(cut_value(g, s.complement, kind), rep.value, rtol=1e-12, atol=1e-300)
        assert np.isclose(cut_value(g, s.members, kind), rep.value, rtol=1e-12, atol=1e-300)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_max_flow_equals_enumeration(seed):
    g = graph_from(seed)
    rng = np.random.default_rng(seed)
    s, t = rng.choice(g.m, 2, replace=False)
    res = st_mincut(g, s, t)
    assert np.isclose(res.value, st_min_by_enumeration(g.weights.tolist(), s, t), rtol=1e-9,
                      atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(KINDS))
def test_xist_upper_bounds_exact(seed, kind):
    g = graph_from(seed)
    res = xist(g, g.masses, kind, vloc_override=range(g.m))
    if res.value is not None:
        assert res.value >= min_cut_exact(g, kind).value * (1 - 1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_root_draws_sum_to_zero(seed):
    p = np.random.default_rng(seed).dirichlet(np.ones(5))
    Z = gaussian_root_sample(p, seed, 50)
    assert np.abs(Z.sum(axis=1)).max() < 1e-12


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(["mcut", "rcut", "ncut"]))
def test_covariance_invariant_to_partition_labelling(seed, kind):
    g = graph_from(seed, lo=3)
    S = [0, g.m - 1]
    a = covariance(kind, g, [S]).matrix
    b = covariance(kind, g, [Partition.of(S, g.m).complement]).matrix
    assert np.allclose(a, b, rtol=1e-10, atol=1e-18)

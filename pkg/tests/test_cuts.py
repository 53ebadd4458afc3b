import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutlimits import (CutKind, MultiPartition, cut_value, min_cut_exact, multiway_cut_value,
                       multiway_min_exact, named_distribution, population_graph, vol)
from cutlimits.cuts import (BalanceFunctional, DegeneratePartitionError, EnumerationCapError,
                            partition_masks, stirling2)
from cutlimits.graph import Partition, WeightedGraph, product_graph

from oracles import objective, set_partitions, two_way_min_by_enumeration

KINDS = [k.value for k in CutKind]


def members(report):
    return sorted(sorted(s.members) for s in report.minimizers)


def test_square_values(square_graph):
    S = [0, 1]
    assert cut_value(square_graph, S, "ncut") == pytest.approx(2, abs=1e-12)
    assert cut_value(square_graph, S, "mcut") == pytest.approx(1 / 8, abs=1e-12)
    assert cut_value(square_graph, S, "rcut") == pytest.approx(1 / 32, abs=1e-12)
    assert cut_value(square_graph, S, "ccut") == pytest.approx(1 / 2, abs=1e-12)
    assert cut_value(square_graph, S, "ncutalt") == pytest.approx(1, abs=1e-12)


def test_square_ncut_minimizers(square_graph):
    rep = min_cut_exact(square_graph, "ncut")
    assert rep.value == pytest.approx(2, abs=1e-12)
    assert members(rep) == [[0, 1], [0, 2]]


@pytest.mark.parametrize("kind", KINDS)
def test_enumeration_matches_loop_oracle(kind, random_graphs):
    for g in random_graphs[:40]:
        best, arg = two_way_min_by_enumeration(g.weights.tolist(), kind)
        rep = min_cut_exact(g, kind)
        assert rep.value == pytest.approx(best, rel=1e-12, abs=1e-15)
        assert {frozenset(s.members) for s in rep.minimizers} == set(arg)


def grid_symmetries(r):
    """Row-major index maps of the eight symmetries of an r x r grid."""
    idx = np.arange(r * r).reshape(r, r)
    maps = []
    for k in range(4):
        rot = np.rot90(idx, k)
        maps += [rot.ravel(), rot.T.ravel()]
    return maps


def test_uniform_grid_rcut_minimizers_closed_under_symmetry():
    g = population_graph(named_distribution("uniform", shape=(3, 3)), 1)
    rep = min_cut_exact(g, "rcut")
    assert len(rep.minimizers) == 4
    found = {s for s in rep.minimizers}
    for perm in grid_symmetries(3):
        for s in rep.minimizers:
            assert Partition.of([int(perm[i]) for i in s.members], 9) in found


@pytest.mark.parametrize("kind", KINDS)
def test_two_nodes_single_candidate(kind):
    g = product_graph([0.25, 0.75], np.array([[0, 1], [1, 0]], bool))
    rep = min_cut_exact(g, kind)
    assert members(rep) == [[0]]
    assert rep.value == pytest.approx(objective(g.weights.tolist(), [0], kind), rel=1e-14)


def test_isolated_component_mcut_zero():
    adj = np.zeros((3, 3), bool)
    adj[0, 1] = adj[1, 0] = True
    g = product_graph([0.3, 0.3, 0.4], adj)
    assert cut_value(g, [0, 1], "mcut") == 0.0


def test_degenerate_partition_signalled():
    adj = np.zeros((3, 3), bool)
    adj[0, 1] = adj[1, 0] = True
    g = product_graph([0.3, 0.3, 0.4], adj)
    with pytest.raises(DegeneratePartitionError):
        cut_value(g, [2], "ncut")
    rep = min_cut_exact(g, "ncut")
    assert Partition.of([2], 3) in rep.skipped


def test_enumeration_cap():
    with pytest.raises(EnumerationCapError):
        partition_masks(26)
    assert partition_masks(4).shape == (7, 4)


def test_minimizers_within_tolerance(random_graphs):
    for g in random_graphs[:20]:
        rep = min_cut_exact(g, "ncut")
        for s in rep.minimizers:
            assert abs(cut_value(g, s, "ncut") - rep.value) <= rep.tolerance * (1 + abs(rep.value))


@pytest.mark.parametrize("kind", KINDS)
def test_complement_symmetry(kind, random_graphs):
    for g in random_graphs:
        mask = np.arange(g.m) % 2 == 0
        assert cut_value(g, mask, kind) == pytest.approx(cut_value(g, ~mask, kind), rel=1e-12)


def test_structural_identities(random_graphs):
    for g in random_graphs:
        mask = np.arange(g.m) < (g.m + 1) // 2
        vs, vc = vol(g, mask), vol(g, ~mask)
        nc = cut_value(g, mask, "ncut")
        assert cut_value(g, mask, "mcut") == pytest.approx(nc * vs * vc, rel=1e-12)
        assert cut_value(g, mask, "ncutalt") == pytest.approx((vs + vc) * nc, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 100), st.integers(0, 2**31 - 1))
def test_weight_scaling(c, seed):
    rng = np.random.default_rng(seed)
    g = population_graph(named_distribution("custom", weights=rng.uniform(0.1, 1, 6),
                                            shape=(2, 3)), 1.5)
    h = WeightedGraph(c * g.weights, g.adjacency)
    powers = {"mcut": 1, "rcut": 1, "ncut": -1, "ccut": 0, "ncutalt": 0}
    mask = np.array([1, 1, 0, 1, 0, 0], bool)
    for kind, pw in powers.items():
        assert cut_value(h, mask, kind) == pytest.approx(c ** pw * cut_value(g, mask, kind),
                                                         rel=1e-10)
    for kind in ("ncut", "ncutalt", "ccut"):
        assert members(min_cut_exact(h, kind, tol=1e-9)) == members(min_cut_exact(g, kind, tol=1e-9))


def test_custom_balance_min_side_size():
    size_min = BalanceFunctional("minsize", lambda k, vi, vo, vt, m: np.minimum(k, m - k) + 0 * vi)
    g = population_graph(named_distribution("uniform", shape=(2, 2)), 1)
    assert cut_value(g, [0, 1], size_min) == pytest.approx(1 / 16, abs=1e-15)


def test_multiway_two_blocks_equal_two_way(random_graphs):
    for g in random_graphs:
        mask = np.arange(g.m) % 3 == 0
        parts = [np.flatnonzero(mask), np.flatnonzero(~mask)]
        for kind in KINDS:
            assert multiway_cut_value(g, parts, kind) == pytest.approx(cut_value(g, mask, kind),
                                                                       rel=1e-12)


def test_multiway_singletons_mcut_is_total_weight(random_graphs):
    for g in random_graphs[:20]:
        singles = [[i] for i in range(g.m)]
        assert multiway_cut_value(g, singles, "mcut") == pytest.approx(g.edge_weights.sum(),
                                                                        rel=1e-12)


def two_triangles():
    adj = np.zeros((6, 6), bool)
    for a, b in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]:
        adj[a, b] = adj[b, a] = True
    return product_graph([0.2, 0.15, 0.18, 0.12, 0.2, 0.15], adj)


@pytest.mark.parametrize("kind", ["mcut", "rcut", "ncut"])
def test_multiway_three_blocks_match_exhaustive(kind):
    g = two_triangles()
    best, arg = np.inf, []
    for part in set_partitions(range(6)):
        if len(part) != 3:
            continue
        vals = [objective(g.weights.tolist(), b, kind) for b in part]
        if any(v is None for v in vals):
            continue
        v = 0.5 * sum(vals)
        if v < best - 1e-12:
            best, arg = v, [part]
        elif abs(v - best) <= 1e-12:
            arg.append(part)
    rep = multiway_min_exact(g, 3, kind)
    assert rep.value == pytest.approx(best, rel=1e-12)
    assert {mp.blocks for mp in rep.minimizers} == {MultiPartition.of(p, 6).blocks for p in arg}


def test_multiway_validation():
    g = two_triangles()
    with pytest.raises(ValueError, match="overlap"):
        multiway_cut_value(g, [[0, 1, 2], [2, 3, 4, 5]], "mcut")
    with pytest.raises(ValueError, match="cover"):
        multiway_cut_value(g, [[0, 1], [3, 4, 5]], "mcut")
    assert stirling2(6, 3) == sum(1 for p in set_partitions(range(6)) if len(p) == 3)

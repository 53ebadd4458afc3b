"""Deterministic st-MinCuts on undirected weighted graphs via Dinic's max-flow."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Partition, WeightedGraph


@dataclass(frozen=True)
class StCutResult:
    """Minimum ``s``-``t`` cut.

    Attributes
    ----------
    value : float
        Total weight of the edges leaving ``partition``.
    partition : Partition
        Nodes reachable from ``s`` in the final residual graph.
    source_side : tuple of int
        The same set as ``partition`` but always the side holding ``s``.
    s, t : int
    flow : float
        Value of the maximum flow; equals ``value`` up to rounding.
    """

    value: float
    partition: Partition
    source_side: tuple[int, ...]
    s: int
    t: int
    flow: float


def _bfs_levels(residual, adj, s, eps):
    level = [-1] * len(adj)
    level[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if level[v] < 0 and residual[u][v] > eps:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def max_flow(weights: np.ndarray, s: int, t: int):
    """Dinic's algorithm on a symmetric capacity matrix.

    Returns
    -------
    flow : float
        Maximum flow value.
    reachable : list of bool
        Residual reachability from ``s`` after termination.
    """
    m = weights.shape[0]
    residual = weights.astype(float).tolist()
    adj = [list(np.flatnonzero(weights[u] > 0)) for u in range(m)]
    scale = float(weights.max()) if weights.size else 0.0
    eps = 1e-12 * scale
    total = 0.0
    while True:
        level = _bfs_levels(residual, adj, s, eps)
        if level[t] < 0:
            return total, [lv >= 0 for lv in level]
        ptr = [0] * m
        while True:
            pushed = _augment(residual, adj, level, ptr, s, t, eps)
            if pushed <= eps:
                break
            total += pushed


def _augment(residual, adj, level, ptr, s, t, eps):
    """Push one blocking-flow path found by iterative DFS on the level graph."""
    path = [s]
    while path:
        u = path[-1]
        if u == t:
            amount = min(residual[a][b] for a, b in zip(path, path[1:]))
            for a, b in zip(path, path[1:]):
                residual[a][b] -= amount
                residual[b][a] += amount
            return amount
        nbrs = adj[u]
        advanced = False
        while ptr[u] < len(nbrs):
            v = nbrs[ptr[u]]
            if level[v] == level[u] + 1 and residual[u][v] > eps:
                path.append(v)
                advanced = True
                break
            ptr[u] += 1
        if not advanced:
            # dead end, prune it from the level graph
            path.pop()
            level[u] = -1
            if path:
                ptr[path[-1]] += 1
    return 0.0


def st_mincut(g: WeightedGraph, s: int, t: int) -> StCutResult:
    """Minimum cut separating ``s`` from ``t``.

    The returned side is the set of nodes reachable from ``s`` in the
    residual graph of a maximum flow, which is the smallest minimizing
    source side. The choice is deterministic.

    Raises
    ------
    ValueError
        If ``s == t`` or either index is out of range.
    """
    s, t = int(s), int(t)
    if s == t:
        raise ValueError("s and t must differ")
    if not (0 <= s < g.m and 0 <= t < g.m):
        raise ValueError("node index out of range")
    flow, reach = max_flow(g.weights, s, t)
    mask = np.array(reach, dtype=bool)
    value = float(g.weights[np.ix_(mask, ~mask)].sum())
    return StCutResult(value, Partition.of(mask, g.m),
                       tuple(int(i) for i in np.flatnonzero(mask)), s, t, flow)


def st_partitions(m: int, s: int, t: int) -> np.ndarray:
    """All node subsets containing ``s`` but not ``t``, as a ``(P, m)`` mask array."""
    others = [i for i in range(m) if i not in (s, t)]
    codes = np.arange(2 ** len(others), dtype=np.int64)
    masks = np.zeros((codes.size, m), dtype=bool)
    masks[:, s] = True
    for b, node in enumerate(others):
        masks[:, node] = (codes >> b) & 1
    return masks


def st_mincut_brute(g: WeightedGraph, s: int, t: int, tol: float = 1e-12):
    """Exhaustive st-MinCut: value and every minimizing source side."""
    masks = st_partitions(g.m, s, t)
    mf = masks.astype(float)
    # weight from inside to outside: sum_{i in S, j not in S} w_ij
    cuts = np.einsum("pi,ij,pj->p", mf, g.weights, 1 - mf)
    best = cuts.min()
    keep = cuts <= best + tol * max(float(g.weights.sum()), abs(best))
    return float(best), masks[keep]

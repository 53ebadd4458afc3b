"""Monte Carlo replication harness and multinomial bootstrap."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cuts import (ENUMERATION_CAP, CutKind, batch_cut_values, crossing_matrix,
                   cut_value, min_cut_exact, partition_masks)
from .discretization import DiscretizedSample, ProbabilityGrid, replicate_rng
from .graph import Partition, as_mask, build_graph, neighbourhood, population_graph
from .maxflow import st_partitions
from .xist import local_maxima_counts, xist

WORKERS_ENV = "CUTLIMITS_WORKERS"
STATISTICS = ("xc_min", "xc_fixed", "xist", "vloc_count", "stmincut_attainer")


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass(frozen=True)
class BootstrapConfig:
    """Resample size rule, number of bootstrap draws and seed.

    ``M_rule`` is ``"sqrt_n"`` (``M = ceil(sqrt(n))``), ``"equal_n"``
    (``M = n``) or ``"fixed"`` with ``M`` given.
    """

    M_rule: str = "sqrt_n"
    B: int = 100
    seed: int = 0
    M: int | None = None

    def __post_init__(self):
        if self.M_rule not in ("sqrt_n", "equal_n", "fixed"):
            raise ValueError(f"unknown M rule {self.M_rule!r}")
        if self.M_rule == "fixed" and (self.M is None or self.M < 1):
            raise ValueError("fixed rule needs M >= 1")
        if self.B < 1:
            raise ValueError("B must be at least 1")

    def resample_size(self, n: int) -> int:
        if self.M_rule == "sqrt_n":
            return math.isqrt(n - 1) + 1 if n > 1 else 1
        if self.M_rule == "equal_n":
            return n
        return int(self.M)


@dataclass(frozen=True)
class McEnsemble:
    """Replicated statistic values with the settings that produced them."""

    values: np.ndarray
    n: int
    R: int
    seed: int
    statistic: str

    def __post_init__(self):
        if len(self.values) != self.R:
            raise ValueError("one value per replicate is required")


def draw_counts(p: np.ndarray, n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Counts for replicates ``start..stop-1``, each from its own stream."""
    return np.array([replicate_rng(seed, r).multinomial(n, p) for r in range(start, stop)],
                    dtype=np.int64).reshape(stop - start, p.size)


def _chunks(R, workers):
    size = max(1, -(-R // (4 * workers))) if workers > 1 else R
    size = min(size, 5000)
    return [(a, min(a + size, R)) for a in range(0, R, size)]


@dataclass(frozen=True)
class _Task:
    grid: ProbabilityGrid
    t: float
    kind: CutKind
    statistic: str
    n: int
    seed: int
    partition: tuple | None
    pair: tuple | None
    center: float
    cap: int


def _evaluate(task: _Task, start: int, stop: int) -> np.ndarray:
    grid, n = task.grid, task.n
    Y = draw_counts(grid.p, n, task.seed, start, stop)
    X = Y / n
    adj = neighbourhood(grid, task.t)
    if task.statistic == "vloc_count":
        return local_maxima_counts(Y, adj).astype(float)
    if task.statistic == "stmincut_attainer":
        return _attainer_codes(X, adj, *task.pair)
    if task.statistic == "xist":
        out = np.empty(len(Y))
        for r, y in enumerate(Y):
            g = build_graph(X[r], grid, task.t, "empirical", n)
            res = xist(g, y, task.kind)
            out[r] = np.nan if res.value is None else res.value
        return math.sqrt(n) * (out - task.center)
    edges = np.stack(np.nonzero(np.triu(adj, 1)), axis=1)
    ew = X[:, edges[:, 0]] * X[:, edges[:, 1]]
    deg = X * (X @ adj.astype(float))
    if task.statistic == "xc_fixed":
        mask = as_mask(task.partition, grid.m)[None]
        vals = batch_cut_values(task.kind, ew, deg, mask, edges)[:, 0]
        if task.kind is CutKind.NCUTALT:
            # centre at the population value rescaled by the empirical total volume
            total = deg.sum(axis=1)
            pop_total = _pop_degrees(grid, adj).sum()
            return math.sqrt(n) * (vals - total / pop_total * task.center)
        return math.sqrt(n) * (vals - task.center)
    masks = partition_masks(grid.m, task.cap)
    cross = crossing_matrix(masks, edges)
    out = np.empty(len(Y))
    for a in range(0, len(Y), 512):
        vals = batch_cut_values(task.kind, ew[a:a + 512], deg[a:a + 512], masks, edges,
                                cross=cross)
        out[a:a + 512] = np.where(np.isnan(vals), np.inf, vals).min(axis=1)
    return math.sqrt(n) * (out - task.center)


def _pop_degrees(grid, adj):
    return grid.p * (adj.astype(float) @ grid.p)


def _attainer_codes(X, adj, s, t):
    """Code of the unique st-MinCut partition per replicate, -1 on ties."""
    m = X.shape[1]
    masks = st_partitions(m, s, t)
    mf = masks.astype(float)
    W = X[:, :, None] * X[:, None, :] * adj
    cuts = np.einsum("pi,rij,pj->rp", mf, W, 1 - mf)
    best = cuts.min(axis=1, keepdims=True)
    scale = W.sum(axis=(1, 2))[:, None]
    ties = (cuts <= best + 1e-12 * scale).sum(axis=1) > 1
    codes = np.array([Partition.of(mk, m).code for mk in masks], dtype=float)
    out = codes[np.argmin(cuts, axis=1)]
    out[ties] = -1
    return out


def mc_statistic(grid: ProbabilityGrid, t: float, kind, statistic: str, n: int, R: int,
                 seed: int, *, partition=None, pair=None, workers: int | None = None,
                 cap: int = ENUMERATION_CAP) -> McEnsemble:
    """Replicate a statistic of ``Y ~ Mult(n, p)`` ``R`` times.

    Parameters
    ----------
    statistic : str
        ``"xc_min"``: ``sqrt(n) (XC(G_n) - XC(G))``.
        ``"xc_fixed"``: ``sqrt(n) (XC_S(G_n) - XC_S(G))`` for ``partition``.
        For NCutAlt the centre is rescaled by the empirical total volume,
        ``vol_n(V) / vol(V) * XC_S(G)``.
        ``"xist"``: ``sqrt(n) (XC(Xist(G_n)) - XC(Xist(G)))``.
        ``"vloc_count"``: number of local maxima of the counts.
        ``"stmincut_attainer"``: ``Partition.code`` of the unique minimum
        cut separating ``pair``, or ``-1`` when it is tied.
    workers : int, optional
        Process count; defaults to the ``CUTLIMITS_WORKERS`` environment
        variable. Results do not depend on it.
    """
    kind = CutKind.parse(kind)
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}")
    if R < 1 or n < 1:
        raise ValueError("R and n must be positive")
    center = 0.0
    pop = population_graph(grid, t)
    if statistic == "xc_fixed":
        if partition is None:
            raise ValueError("xc_fixed needs a partition")
        partition = tuple(np.flatnonzero(as_mask(partition, grid.m)))
        center = cut_value(pop, partition, kind)
    elif statistic == "xc_min":
        center = min_cut_exact(pop, kind, cap=cap).value
    elif statistic == "xist":
        res = xist(pop, grid.p, kind)
        if res.value is None:
            raise ValueError("Xist on the population graph returns no partition")
        center = res.value
    elif statistic == "stmincut_attainer":
        if pair is None or len(pair) != 2:
            raise ValueError("stmincut_attainer needs an (s, t) pair")
        pair = (int(pair[0]), int(pair[1]))
    task = _Task(grid, float(t), kind, statistic, int(n), int(seed), partition, pair,
                 center, cap)
    workers = default_workers() if workers is None else max(1, int(workers))
    spans = _chunks(int(R), workers)
    if workers == 1:
        parts = [_evaluate(task, a, b) for a, b in spans]
    else:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_evaluate, [task] * len(spans),
                                [a for a, _ in spans], [b for _, b in spans]))
    return McEnsemble(np.concatenate(parts), int(n), int(R), int(seed), statistic)


def bootstrap_distribution(sample: DiscretizedSample, grid: ProbabilityGrid, t: float,
                           kind, cfg: BootstrapConfig,
                           cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Bootstrap draws of ``sqrt(M) (XC(G*_M) - XC(G_n))``.

    Each draw resamples ``Y* ~ Mult(M, Y / n)`` and rebuilds the weights
    ``Y*_i Y*_j / M^2`` on the same neighbourhood structure.
    """
    kind = CutKind.parse(kind)
    n = sample.n
    M = cfg.resample_size(n)
    freq = sample.frequencies
    emp = build_graph(freq, grid, t, "empirical", n)
    base = min_cut_exact(emp, kind, cap=cap).value
    Ystar = draw_counts(freq, M, cfg.seed, 0, cfg.B)
    X = Ystar / M
    adj = emp.adjacency
    edges = emp.edges
    ew = X[:, edges[:, 0]] * X[:, edges[:, 1]]
    deg = X * (X @ adj.astype(float))
    masks = partition_masks(grid.m, cap)
    cross = crossing_matrix(masks, edges)
    out = np.empty(cfg.B)
    for a in range(0, cfg.B, 512):
        vals = batch_cut_values(kind, ew[a:a + 512], deg[a:a + 512], masks, edges, cross=cross)
        out[a:a + 512] = np.where(np.isnan(vals), np.inf, vals).min(axis=1)
    return math.sqrt(M) * (out - base)

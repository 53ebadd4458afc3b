"""Xist: best balanced cut among st-MinCuts between local maxima."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cuts import (DEFAULT_TOLERANCE, ENUMERATION_CAP, CutKind,
                   DegeneratePartitionError, cut_value, min_cut_exact)
from .graph import Partition, WeightedGraph, as_mask
from .maxflow import st_mincut, st_mincut_brute


def local_maxima(g: WeightedGraph, masses) -> list[int]:
    """Nodes whose mass is at least that of every neighbour, ascending."""
    x = np.asarray(masses, dtype=float)
    if x.shape != (g.m,):
        raise ValueError("one mass per node is required")
    # a node loses if some neighbour is strictly heavier
    beaten = (g.adjacency & (x[None, :] > x[:, None])).any(axis=1)
    return [int(i) for i in np.flatnonzero(~beaten)]


def local_maxima_counts(masses: np.ndarray, adjacency: np.ndarray) -> np.ndarray:
    """Number of local maxima for each row of a ``(R, m)`` mass array."""
    x = np.asarray(masses, dtype=float)
    count = np.zeros(x.shape[0], dtype=np.int64)
    for i in range(x.shape[1]):
        nb = np.flatnonzero(adjacency[i])
        if nb.size == 0:
            count += 1
            continue
        count += np.all(x[:, [i]] >= x[:, nb], axis=1)
    return count


@dataclass(frozen=True)
class XistResult:
    """Outcome of one Xist run.

    Attributes
    ----------
    value : float or None
        Best objective among the evaluated st-MinCuts.
    partition : Partition or None
        Partition attaining ``value``.
    vloc : list of int
        Local maxima used as terminals, ascending.
    computed_pairs : list of (int, int)
        ``(s, t)`` pairs whose st-MinCut was computed, in order.
    best_pair : (int, int) or None
        Pair whose st-MinCut gave ``partition``.
    terminated_trivially : bool
        True when there was a single local maximum.
    """

    value: float | None
    partition: Partition | None
    vloc: list[int]
    computed_pairs: list[tuple[int, int]] = field(default_factory=list)
    best_pair: tuple[int, int] | None = None
    terminated_trivially: bool = False

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "partition": None if self.partition is None else list(self.partition.members),
            "vloc": self.vloc,
            "computed_pairs": [list(p) for p in self.computed_pairs],
            "best_pair": None if self.best_pair is None else list(self.best_pair),
            "terminated_trivially": self.terminated_trivially,
        }


def xist(g: WeightedGraph, masses, kind, vloc_override=None) -> XistResult:
    """Run Xist on ``g``.

    Parameters
    ----------
    g : WeightedGraph
    masses : array_like
        Node masses used to find local maxima (``p`` or the counts ``Y``).
    kind : CutKind or str
    vloc_override : iterable of int, optional
        Use these nodes as terminals instead of the local maxima.
    """
    kind = CutKind.parse(kind)
    if vloc_override is not None:
        vloc = sorted({int(v) for v in vloc_override})
    else:
        vloc = local_maxima(g, masses)
    if len(vloc) <= 1:
        return XistResult(None, None, vloc, terminated_trivially=True)

    N = len(vloc)
    # tau holds 0-based positions into vloc; everybody starts attached to vloc[0]
    tau = [0] * N
    best_val, best_part, best_pair = np.inf, None, None
    pairs = []
    for i in range(1, N):
        s, t = vloc[i], vloc[tau[i]]
        res = st_mincut(g, s, t)
        pairs.append((s, t))
        side = res.source_side
        try:
            val = cut_value(g, side, kind)
        except DegeneratePartitionError:
            val = np.inf
        if val < best_val:
            best_val, best_part, best_pair = val, res.partition, (s, t)
        inside = set(side)
        for j in range(i, N):
            if vloc[j] in inside and tau[j] == tau[i]:
                tau[j] = i
    if best_part is None:
        return XistResult(None, None, vloc, pairs)
    return XistResult(float(best_val), best_part, vloc, pairs, best_pair)


@dataclass(frozen=True)
class XistComparison:
    xist_value: float | None
    exact_value: float
    gap: float | None
    attains_st_mincut: bool
    xist_partition: Partition | None
    exact_minimizers: tuple[Partition, ...]


def is_st_mincut(g: WeightedGraph, S, s: int, t: int, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Whether ``S`` (or its complement) attains the minimum ``s``-``t`` cut."""
    mask = as_mask(S, g.m)
    if not mask[s]:
        mask = ~mask
    if mask[t]:
        return False
    _, minimizers = st_mincut_brute(g, s, t, tol)
    return bool(np.any(np.all(minimizers == mask, axis=1)))


def xist_vs_exact(g: WeightedGraph, masses, kind, vloc_override=None,
                  cap: int = ENUMERATION_CAP) -> XistComparison:
    """Compare Xist with exhaustive minimization on a small graph."""
    kind = CutKind.parse(kind)
    exact = min_cut_exact(g, kind, cap=cap)
    res = xist(g, masses, kind, vloc_override)
    attains = False
    if res.partition is not None:
        vloc = res.vloc
        attains = any(is_st_mincut(g, res.partition, s, t)
                      for a, s in enumerate(vloc) for t in vloc[a + 1:])
    gap = None if res.value is None else res.value - exact.value
    return XistComparison(res.value, exact.value, gap, attains, res.partition,
                          exact.minimizers)

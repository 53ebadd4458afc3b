"""Limiting distributions of balanced cut statistics.

Every statistic ``sqrt(n) * (XC_S(G_n) - XC_S(G))`` is asymptotically a
linear functional ``<Z, c_S>`` of the multinomial root
``Z ~ N(0, diag(p) - p p^T)``. The coefficient vector ``c_S`` comes from
the gradient of the cut objective with respect to the node masses. The
exceptions are Cheeger cuts of equal-volume partitions, where the
balancing term is only directionally differentiable and the functional
becomes a pointwise minimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cuts import (DEFAULT_TOLERANCE, ENUMERATION_CAP, CutKind, CutReport,
                   BalanceFunctional, DegeneratePartitionError, MultiPartition,
                   cut_value, minimizer_indices)
from .discretization import as_rng
from .graph import Partition, WeightedGraph, as_mask
from .maxflow import st_mincut_brute
from .xist import xist

VOLUME_TIE_TOLERANCE = 1e-12


class AssumptionError(ValueError):
    """A structural assumption of a limit theorem fails on the given graph."""


def _masses(g: WeightedGraph) -> np.ndarray:
    if g.masses is None:
        raise ValueError("limit laws need a graph built from node masses")
    return g.masses


def _adj(g: WeightedGraph) -> np.ndarray:
    return g.adjacency.astype(float)


def q_vector(g: WeightedGraph, S) -> np.ndarray:
    """Mass of the neighbours across the cut, per node.

    ``q_i = sum_{j ~ i, j on the other side} p_j``. Its ``p``-weighted sum
    is twice the cut weight.
    """
    mask = as_mask(S, g.m)
    p = _masses(g)
    A = _adj(g)
    return np.where(mask, A @ np.where(mask, 0.0, p), A @ np.where(mask, p, 0.0))


def volume_gradient(g: WeightedGraph, S) -> np.ndarray:
    """Derivative of ``vol(S)`` with respect to the node masses.

    With ``a_r`` the neighbour mass of ``r`` and ``b_r`` its neighbour mass
    inside ``S``, the derivative is ``1{r in S} a_r + b_r``.
    """
    mask = as_mask(S, g.m)
    p = _masses(g)
    A = _adj(g)
    return np.where(mask, A @ p, 0.0) + A @ np.where(mask, p, 0.0)


def volume_root(g: WeightedGraph, S, Z: np.ndarray) -> np.ndarray:
    """``sum_{i in T} sum_{j ~ i} (p_i Z_j + p_j Z_i)`` for each row of ``Z``."""
    return Z @ volume_gradient(g, S)


def _volumes(g, mask):
    deg = g.degrees
    return float(deg[mask].sum()), float(deg[~mask].sum())


def volumes_tie(g: WeightedGraph, S, tol: float = VOLUME_TIE_TOLERANCE) -> bool:
    v_in, v_out = _volumes(g, as_mask(S, g.m))
    return abs(v_in - v_out) <= tol * (v_in + v_out)


def balance_gradient(kind, g: WeightedGraph, S) -> np.ndarray:
    """Derivative of the balancing term of a differentiable kind."""
    kind = CutKind.parse(kind)
    mask = as_mask(S, g.m)
    if isinstance(kind, BalanceFunctional):
        if kind.gradient is None:
            raise ValueError(f"balance {kind.name!r} has no gradient")
        return np.asarray(kind.gradient(g, mask), dtype=float)
    if kind in (CutKind.MCUT, CutKind.RCUT):
        return np.zeros(g.m)
    if kind is CutKind.NCUT:
        v_in, v_out = _volumes(g, mask)
        return v_out * volume_gradient(g, mask) + v_in * volume_gradient(g, ~mask)
    raise ValueError(f"{kind} has no single balance gradient here")


def coefficients(kind, g: WeightedGraph, S, side=None) -> np.ndarray:
    """Vector ``c_S`` with ``Z_S = <Z, c_S>`` in the limit.

    Parameters
    ----------
    side : array_like, optional
        For Cheeger cuts, the side whose volume is the balancing term.
        Defaults to the strictly smaller side; required on volume ties.
    """
    kind = CutKind.parse(kind)
    mask = as_mask(S, g.m)
    q = q_vector(g, mask)
    value = cut_value(g, mask, kind)
    if kind is CutKind.NCUTALT:
        v_in, v_out = _volumes(g, mask)
        return (v_in + v_out) * coefficients(CutKind.NCUT, g, mask)
    if kind is CutKind.CCUT:
        if side is None:
            if volumes_tie(g, mask):
                raise AssumptionError("equal volumes: the Cheeger limit is not Gaussian")
            v_in, v_out = _volumes(g, mask)
            side = mask if v_in < v_out else ~mask
        side = as_mask(side, g.m)
        v_side = float(g.degrees[side].sum())
        return (q - value * volume_gradient(g, side)) / v_side
    return (q - value * balance_gradient(kind, g, mask)) / _balance_of(kind, g, mask)


def _balance_of(kind, g, mask):
    v_in, v_out = _volumes(g, mask)
    if kind is CutKind.MCUT:
        return 1.0
    if kind is CutKind.RCUT:
        k = int(mask.sum())
        return float(k * (g.m - k))
    if kind is CutKind.NCUT:
        return v_in * v_out
    if isinstance(kind, BalanceFunctional):
        return float(kind.balance(np.array(mask.sum()), np.array(v_in), np.array(v_out),
                                  np.array(v_in + v_out), m=g.m))
    raise ValueError(f"unsupported kind {kind}")


def _as_masks(partitions, m):
    if isinstance(partitions, CutReport):
        partitions = partitions.minimizers
    return np.array([as_mask(S, m) for S in partitions], dtype=bool).reshape(-1, m)


def root_covariance(C: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Covariance of ``C @ Z`` for ``Z ~ N(0, diag(p) - p p^T)``."""
    Cp = C @ p
    cov = (C * p) @ C.T - np.outer(Cp, Cp)
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class LimitCovariance:
    kind: CutKind
    partitions: tuple[Partition, ...]
    matrix: np.ndarray


def covariance(kind, g: WeightedGraph, partitions) -> LimitCovariance:
    """Joint limiting covariance of the statistics of several partitions.

    Cheeger cuts are routed to :func:`covariance_ccut_unequal`.
    """
    kind = CutKind.parse(kind)
    if kind is CutKind.CCUT:
        return covariance_ccut_unequal(g, partitions)
    masks = _as_masks(partitions, g.m)
    parts = tuple(Partition.of(mk, g.m) for mk in masks)
    p = _masses(g)
    if kind is CutKind.NCUTALT:
        total = float(g.degrees.sum())
        base = covariance(CutKind.NCUT, g, masks).matrix
        return LimitCovariance(kind, parts, total ** 2 * base)
    C = np.array([coefficients(kind, g, mk) for mk in masks]).reshape(len(masks), g.m)
    return LimitCovariance(kind, parts, root_covariance(C, p))


def covariance_ccut_unequal(g: WeightedGraph, partitions) -> LimitCovariance:
    """Cheeger cut covariance for partitions whose sides differ in volume.

    Raises
    ------
    AssumptionError
        If a partition has equal volumes; use :func:`limit_sampler`, whose
        draws follow the mixture law in that case.
    """
    masks = _as_masks(partitions, g.m)
    for mk in masks:
        if volumes_tie(g, mk):
            raise AssumptionError(
                f"partition {Partition.of(mk, g.m)} has equal volumes; "
                "its limit is a mixture, sample it with limit_sampler")
    C = np.array([coefficients(CutKind.CCUT, g, mk) for mk in masks]).reshape(len(masks), g.m)
    parts = tuple(Partition.of(mk, g.m) for mk in masks)
    return LimitCovariance(CutKind.CCUT, parts, root_covariance(C, _masses(g)))


def gaussian_root_sample(p, seed, size: int | None = None) -> np.ndarray:
    """Draws of ``Z ~ N(0, diag(p) - p p^T)`` without factorizing the covariance.

    ``Z = sqrt(p) * G - p * <sqrt(p), G>`` for standard normal ``G``.
    Every draw sums to zero.
    """
    p = np.asarray(p, dtype=float)
    rng = as_rng(seed)
    shape = (p.size,) if size is None else (int(size), p.size)
    G = rng.standard_normal(shape)
    r = np.sqrt(p)
    return r * G - np.multiply.outer(G @ r, p)


def partition_draws(kind, g: WeightedGraph, masks: np.ndarray, Z: np.ndarray,
                    ccut_side: str = "auto") -> np.ndarray:
    """Limit draws ``Z_S`` for each partition, shape ``(N, P)``.

    Parameters
    ----------
    ccut_side : {"auto", "fixed"}
        For Cheeger cuts with equal volumes, ``"auto"`` takes the minimum
        over both sides inside the balancing-term derivative, which is the
        correct limit. ``"fixed"`` always uses the side containing node 0,
        the Gaussian one would get by wrongly assuming unequal volumes.
    """
    kind = CutKind.parse(kind)
    masks = np.atleast_2d(masks)
    out = np.empty((Z.shape[0], masks.shape[0]))
    for k, mk in enumerate(masks):
        if kind is CutKind.CCUT and volumes_tie(g, mk):
            value = cut_value(g, mk, kind)
            v_side = min(_volumes(g, mk))
            q_part = Z @ q_vector(g, mk)
            if ccut_side == "fixed":
                side = mk if mk[0] else ~mk
                d = volume_root(g, side, Z)
            elif ccut_side == "auto":
                d = np.minimum(volume_root(g, mk, Z), volume_root(g, ~mk, Z))
            else:
                raise ValueError(f"unknown ccut_side {ccut_side!r}")
            out[:, k] = (q_part - value * d) / v_side
        else:
            out[:, k] = Z @ coefficients(kind, g, mk)
    return out


def limit_sampler(kind, g: WeightedGraph, minimizers, n_draws: int, seed,
                  ccut_side: str = "auto", chunk: int = 100_000) -> np.ndarray:
    """Draws from the limit of ``sqrt(n) * (XC(G_n) - XC(G))``.

    The limit is the minimum of ``Z_S`` over the minimizing partitions.

    Parameters
    ----------
    kind : CutKind or str
    g : WeightedGraph
        Population graph.
    minimizers : CutReport or sequence of partitions
        Minimizing partitions, usually ``min_cut_exact(g, kind)``.
    n_draws : int
    seed : int or Generator
    ccut_side : {"auto", "fixed"}
        See :func:`partition_draws`.
    """
    kind = CutKind.parse(kind)
    masks = _as_masks(minimizers, g.m)
    if masks.shape[0] == 0:
        raise ValueError("at least one minimizing partition is required")
    rng = as_rng(seed)
    p = _masses(g)
    out = np.empty(int(n_draws))
    for start in range(0, int(n_draws), chunk):
        stop = min(start + chunk, int(n_draws))
        Z = gaussian_root_sample(p, rng, stop - start)
        out[start:stop] = partition_draws(kind, g, masks, Z, ccut_side).min(axis=1)
    return out


def _multiway_masks(g, partitions):
    if isinstance(partitions, CutReport):
        partitions = partitions.minimizers
    parts = [pt if isinstance(pt, MultiPartition) else MultiPartition.of(pt, g.m)
             for pt in partitions]
    return parts


def multiway_covariance(kind, g: WeightedGraph, partitions) -> np.ndarray:
    """Covariance of the ``k``-way limits ``1/2 sum_l Z_{S_l}`` across partitions."""
    kind = CutKind.parse(kind)
    parts = _multiway_masks(g, partitions)
    rows = []
    for pt in parts:
        C = np.array([coefficients(kind, g, mk) for mk in pt.masks()])
        rows.append(0.5 * C.sum(axis=0))
    return root_covariance(np.array(rows), _masses(g))


def multiway_limit_sampler(kind, g: WeightedGraph, k: int, minimizers, n_draws: int,
                           seed, chunk: int = 100_000) -> np.ndarray:
    """Draws from the limit of the optimal ``k``-way cut statistic."""
    kind = CutKind.parse(kind)
    parts = _multiway_masks(g, minimizers)
    if k < 2 or any(pt.k != k for pt in parts):
        raise ValueError(f"all partitions must have exactly k={k} blocks")
    rng = as_rng(seed)
    p = _masses(g)
    out = np.empty(int(n_draws))
    for start in range(0, int(n_draws), chunk):
        stop = min(start + chunk, int(n_draws))
        Z = gaussian_root_sample(p, rng, stop - start)
        vals = np.stack([0.5 * partition_draws(kind, g, pt.masks(), Z).sum(axis=1)
                         for pt in parts], axis=1)
        out[start:stop] = vals.min(axis=1)
    return out


def xist_limit_variance(g: WeightedGraph, kind, tol: float = DEFAULT_TOLERANCE,
                        cap: int = ENUMERATION_CAP) -> float:
    """Variance of the Gaussian limit of the Xist statistic.

    The uniqueness assumption is checked by enumeration: among all st-MinCut
    partitions between local maxima, a single one must minimize the
    objective, and it must be the only st-MinCut of the pair producing it.

    Raises
    ------
    AssumptionError
        Naming the partitions that break uniqueness.
    """
    kind = CutKind.parse(kind)
    if g.m > cap:
        raise AssumptionError("graph too large to verify uniqueness; "
                              "compute covariance() for the asserted partition instead")
    p = _masses(g)
    res = xist(g, p, kind)
    if res.partition is None:
        raise AssumptionError("a single local maximum; Xist returns no partition")
    vloc = res.vloc
    candidates = {}
    unique_for = set()
    for a, s in enumerate(vloc):
        for t in vloc[a + 1:]:
            _, sides = st_mincut_brute(g, s, t, tol)
            for side in sides:
                part = Partition.of(side, g.m)
                if part not in candidates:
                    try:
                        candidates[part] = cut_value(g, side, kind)
                    except DegeneratePartitionError:
                        continue
            if len(sides) == 1:
                unique_for.add(Partition.of(sides[0], g.m))
    parts = list(candidates)
    vals = np.array([candidates[s] for s in parts])
    best = [parts[i] for i in minimizer_indices(vals, tol)]
    if len(best) > 1:
        raise AssumptionError("several st-MinCut partitions minimize the objective: "
                              + ", ".join(map(str, best)))
    if best[0] not in unique_for:
        raise AssumptionError(f"partition {best[0]} is not the unique st-MinCut of any pair")
    if best[0] != res.partition:
        raise AssumptionError(f"Xist returns {res.partition}, not the minimizer {best[0]}")
    if kind is CutKind.CCUT:
        return float(covariance_ccut_unequal(g, [best[0]]).matrix[0, 0])
    return float(covariance(kind, g, [best[0]]).matrix[0, 0])

"""Binning of samples into rectangular grids and the multinomial model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ProbabilityGrid:
    """Rectangular grid of bins with a probability attached to each bin.

    Bins are indexed in row-major (C) order. Along every axis the bins are
    half-open intervals ``[a, b)`` except the last one, which is closed.

    Parameters
    ----------
    shape : tuple of int
        Number of bins per axis.
    p : ndarray
        Probability of each bin, flattened in row-major order.
    edges : tuple of ndarray, optional
        Bin edges per axis. Defaults to unit-width bins whose centers sit on
        the integer lattice ``0, 1, ..., shape[k] - 1``.
    """

    shape: tuple[int, ...]
    p: np.ndarray
    edges: tuple[np.ndarray, ...] = field(default=None)

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        if not shape or any(s < 1 for s in shape):
            raise ValueError(f"invalid grid shape {self.shape}")
        object.__setattr__(self, "shape", shape)
        p = np.array(self.p, dtype=float).ravel()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        if p.size != math.prod(shape):
            raise ValueError(
                f"expected {math.prod(shape)} probabilities, got {p.size}")
        if p.size < 2:
            raise ValueError("a grid needs at least two bins")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("p must be nonnegative and sum to one")
        if self.edges is None:
            edges = tuple(np.arange(s + 1, dtype=float) - 0.5 for s in shape)
        else:
            edges = tuple(np.asarray(e, dtype=float) for e in self.edges)
            if len(edges) != len(shape):
                raise ValueError("one edge array per axis is required")
            for e, s in zip(edges, shape):
                if e.size != s + 1 or np.any(np.diff(e) <= 0):
                    raise ValueError("edges must be increasing with shape+1 entries")
        for e in edges:
            e.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def m(self) -> int:
        return self.p.size

    @property
    def centers(self) -> np.ndarray:
        """Geometric bin centers, shape ``(m, ndim)``."""
        mids = [(e[:-1] + e[1:]) / 2 for e in self.edges]
        mesh = np.meshgrid(*mids, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)

    def with_p(self, p) -> "ProbabilityGrid":
        return ProbabilityGrid(self.shape, p, self.edges)


@dataclass(frozen=True)
class DiscretizedSample:
    """Bin counts of ``n`` observations.

    Parameters
    ----------
    counts : ndarray of int
        Number of observations per bin.
    n : int
        Total sample size.
    """

    counts: np.ndarray
    n: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64).ravel()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        if int(self.n) < 1 or counts.sum() != int(self.n):
            raise ValueError("counts must sum to a positive n")
        object.__setattr__(self, "n", int(self.n))

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.n


def discretize(points, grid: ProbabilityGrid) -> DiscretizedSample:
    """Count how many points fall into each bin of ``grid``.

    Raises
    ------
    ValueError
        If a point lies outside the bounding box; the message names the
        index of the first offending point.
    """
    pts = np.asarray(points, dtype=float)
    ndim = len(grid.shape)
    if pts.ndim == 1:
        pts = pts.reshape(-1, ndim) if ndim > 1 else pts[:, None]
    if pts.shape[1] != ndim:
        raise ValueError(f"points must have {ndim} coordinates")
    if len(pts) == 0:
        raise ValueError("no points to discretize")
    idx = np.zeros((len(pts), ndim), dtype=np.int64)
    outside = np.zeros(len(pts), dtype=bool)
    for k, e in enumerate(grid.edges):
        x = pts[:, k]
        outside |= ~((x >= e[0]) & (x <= e[-1]))
        # half-open bins, the last bin of an axis is closed
        idx[:, k] = np.clip(np.searchsorted(e, x, side="right") - 1,
                            0, grid.shape[k] - 1)
    if outside.any():
        bad = int(np.flatnonzero(outside)[0])
        raise ValueError(f"point {bad} lies outside the grid")
    flat = np.ravel_multi_index(tuple(idx.T), grid.shape)
    counts = np.bincount(flat, minlength=grid.m)
    return DiscretizedSample(counts, len(pts))


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for replicate ``index`` of a run seeded by ``seed``.

    The stream is keyed by ``(seed, index)`` only, so replicate ``r`` draws
    the same numbers whether replicates run serially or on many workers.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required")
    return np.random.default_rng(seed)


def sample_multinomial(grid: ProbabilityGrid, n: int, seed) -> DiscretizedSample:
    """Draw ``Y ~ Mult(n, p)`` on ``grid``."""
    if int(n) < 1:
        raise ValueError("n must be at least 1")
    counts = as_rng(seed).multinomial(int(n), grid.p)
    return DiscretizedSample(counts, int(n))


def normalize_exact(weights: Sequence[float]) -> np.ndarray:
    """Normalize weights in rational arithmetic, then round once to float.

    Equal weights give bit-identical probabilities, so symmetric ties
    survive the conversion.
    """
    fr = [Fraction(w) for w in weights]
    if any(w <= 0 for w in fr):
        raise ValueError("weights must be positive")
    total = sum(fr)
    return np.array([float(w / total) for w in fr])


def equal_volume_lambda(eps: float) -> float:
    """Top-row weight of ``bimodal3x3`` giving the two modes equal volume."""
    return math.sqrt(1 + 1.5 * eps + eps ** 2)


def named_distribution(name: str, **params) -> ProbabilityGrid:
    """Build one of the built-in grids.

    Parameters
    ----------
    name : {"uniform", "bimodal3x3", "band4x4", "custom"}
        ``uniform`` takes ``shape``. ``bimodal3x3`` takes ``eps`` and
        ``lam`` (``"auto"`` picks the equal-volume value); rows from top to
        bottom carry weights ``lam, eps, 1``. ``band4x4`` takes ``eps`` and
        has row weights ``1, eps, eps, 1``. ``custom`` takes ``weights`` and
        an optional ``shape`` (defaults to a single row).
    """
    if name == "uniform":
        shape = tuple(params.get("shape", (3, 3)))
        w = [1] * math.prod(shape)
    elif name == "bimodal3x3":
        eps = params.get("eps", 0.4)
        lam = params.get("lam", "auto")
        if lam == "auto":
            lam = equal_volume_lambda(eps)
        shape = (3, 3)
        w = [lam] * 3 + [eps] * 3 + [1] * 3
    elif name == "band4x4":
        eps = params.get("eps", 1.0)
        shape = (4, 4)
        w = [1] * 4 + [eps] * 8 + [1] * 4
    elif name == "custom":
        w = list(np.asarray(params["weights"], dtype=float).ravel())
        shape = tuple(params.get("shape", (1, len(w))))
    else:
        raise ValueError(f"unknown distribution {name!r}")
    return ProbabilityGrid(shape, normalize_exact(w))

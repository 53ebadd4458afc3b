"""Neighbourhood graphs on grid bins and their volume primitives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .discretization import DiscretizedSample, ProbabilityGrid, as_rng


def neighbourhood(grid: ProbabilityGrid, t: float) -> np.ndarray:
    """Boolean adjacency of bins whose centers are within distance ``t``.

    Squared distances are compared with ``t**2`` in extended precision, so
    thresholds such as ``sqrt(2)`` or ``sqrt(5)`` on the unit lattice are
    resolved without rounding ambiguity.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    c = grid.centers.astype(np.longdouble)
    diff = c[:, None, :] - c[None, :, :]
    d2 = np.sum(diff * diff, axis=-1)
    tt = np.longdouble(t) * np.longdouble(t)
    adj = d2 <= tt
    np.fill_diagonal(adj, False)
    return adj


@dataclass(frozen=True)
class WeightedGraph:
    """Symmetric weighted graph on ``m`` nodes.

    Parameters
    ----------
    weights : ndarray
        Symmetric nonnegative ``(m, m)`` matrix with zero diagonal.
    adjacency : ndarray of bool
        Edge set. ``weights[i, j] > 0`` only where ``adjacency[i, j]``.
    masses : ndarray, optional
        Node masses the weights were built from (``p`` or ``Y / n``).
    source : str
        ``"population"``, ``"empirical"`` or ``"custom"``.
    n : int, optional
        Sample size for empirical graphs.
    """

    weights: np.ndarray
    adjacency: np.ndarray
    masses: np.ndarray | None = None
    source: str = "custom"
    n: int | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        a = np.array(self.adjacency, dtype=bool)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape != a.shape:
            raise ValueError("weights and adjacency must be matching square matrices")
        if not np.array_equal(w, w.T) or not np.array_equal(a, a.T):
            raise ValueError("graph must be symmetric")
        if np.any(np.diag(w) != 0) or np.any(np.diag(a)):
            raise ValueError("self loops are not allowed")
        if np.any(w < 0) or np.any((w > 0) & ~a):
            raise ValueError("weights must be nonnegative and supported on edges")
        for arr in (w, a):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "adjacency", a)
        if self.masses is not None:
            x = np.array(self.masses, dtype=float)
            x.setflags(write=False)
            object.__setattr__(self, "masses", x)

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    @property
    def edges(self) -> np.ndarray:
        """Edge list ``(E, 2)`` with ``i < j``, in row-major order."""
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.stack([i, j], axis=1)

    @property
    def edge_weights(self) -> np.ndarray:
        e = self.edges
        return self.weights[e[:, 0], e[:, 1]]

    def to_dict(self, grid: ProbabilityGrid | None = None) -> dict:
        nodes = []
        for i in range(self.m):
            node = {"id": i}
            if grid is not None:
                node["center"] = grid.centers[i].tolist()
            if self.masses is not None:
                node["mass"] = float(self.masses[i])
            nodes.append(node)
        edges = [{"i": int(i), "j": int(j), "weight": float(self.weights[i, j])}
                 for i, j in self.edges]
        return {"source": self.source, "n": self.n, "nodes": nodes, "edges": edges}


def product_graph(x, adjacency, source="custom", n=None) -> WeightedGraph:
    """Graph with weights ``x_i * x_j`` on the edges of ``adjacency``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("masses must be nonnegative")
    w = np.where(adjacency, np.outer(x, x), 0.0)
    return WeightedGraph(w, adjacency, x, source, n)


def build_graph(x, grid: ProbabilityGrid, t: float, source: str = "population",
                n: int | None = None) -> WeightedGraph:
    """Weighted ``t``-neighbourhood graph with ``w_ij = x_i x_j 1{i ~ j}``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (grid.m,):
        raise ValueError("x must have one entry per bin")
    return product_graph(x, neighbourhood(grid, t), source, n)


def population_graph(grid: ProbabilityGrid, t: float) -> WeightedGraph:
    return build_graph(grid.p, grid, t, "population")


def empirical_graph(sample: DiscretizedSample, grid: ProbabilityGrid, t: float) -> WeightedGraph:
    return build_graph(sample.frequencies, grid, t, "empirical", sample.n)


def as_mask(S: Iterable[int] | np.ndarray, m: int) -> np.ndarray:
    """Boolean membership vector of ``S`` among ``m`` nodes."""
    if isinstance(S, np.ndarray) and S.dtype == bool:
        if S.shape != (m,):
            raise ValueError("mask has the wrong length")
        return S
    if hasattr(S, "mask"):
        return S.mask(m)
    mask = np.zeros(m, dtype=bool)
    idx = np.fromiter((int(i) for i in S), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= m):
        raise ValueError("node index out of range")
    mask[idx] = True
    return mask


def vol(g: WeightedGraph, S) -> float:
    """Volume ``sum_{i in S} sum_j w_ij``."""
    return float(g.degrees[as_mask(S, g.m)].sum())


@dataclass(frozen=True)
class Partition:
    """Two-way split of the nodes, stored by the side containing node 0."""

    members: tuple[int, ...]
    m: int

    @classmethod
    def of(cls, S, m: int) -> "Partition":
        mask = as_mask(S, m).copy()
        if mask.all() or not mask.any():
            raise ValueError("both sides of a partition must be nonempty")
        if not mask[0]:
            mask = ~mask
        return cls(tuple(int(i) for i in np.flatnonzero(mask)), m)

    def mask(self, m: int | None = None) -> np.ndarray:
        if m is not None and m != self.m:
            raise ValueError("partition belongs to a graph of another size")
        out = np.zeros(self.m, dtype=bool)
        out[list(self.members)] = True
        return out

    @property
    def complement(self) -> tuple[int, ...]:
        inside = set(self.members)
        return tuple(i for i in range(self.m) if i not in inside)

    @property
    def code(self) -> int:
        """Bit pattern of the complement over nodes ``1..m-1``; the enumeration index."""
        return sum(1 << (i - 1) for i in self.complement)

    def __str__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass(frozen=True)
class EdgeBias:
    edges: np.ndarray
    mean: np.ndarray
    se: np.ndarray
    target: np.ndarray

    @property
    def z(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.se > 0, (self.mean - self.target) / self.se,
                            np.where(self.mean == self.target, 0.0, np.inf))


def weight_unbiasedness_check(grid: ProbabilityGrid, n: int, reps: int, seed,
                              t: float = 1.0) -> EdgeBias:
    """Monte Carlo mean of ``n/(n-1) * w_hat_ij`` against ``p_i p_j`` per edge."""
    if n < 2:
        raise ValueError("n must be at least 2")
    adj = neighbourhood(grid, t)
    i, j = np.nonzero(np.triu(adj, 1))
    Y = as_rng(seed).multinomial(n, grid.p, size=reps).astype(float)
    vals = (n / (n - 1)) * Y[:, i] * Y[:, j] / n ** 2
    return EdgeBias(np.stack([i, j], axis=1), vals.mean(0),
                    vals.std(0, ddof=1) / np.sqrt(reps), grid.p[i] * grid.p[j])

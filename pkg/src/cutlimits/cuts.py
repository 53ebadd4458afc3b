"""Balanced cut objectives and their exact minimization by enumeration."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import Partition, WeightedGraph, as_mask

DEFAULT_TOLERANCE = 1e-12
ENUMERATION_CAP = 25


class DegeneratePartitionError(ValueError):
    """A partition whose balancing term vanishes."""


class EnumerationCapError(ValueError):
    """Too many candidates for exhaustive search."""


class CutKind(enum.Enum):
    MCUT = "mcut"
    RCUT = "rcut"
    NCUT = "ncut"
    NCUTALT = "ncutalt"
    CCUT = "ccut"

    @classmethod
    def parse(cls, kind) -> "CutKind | BalanceFunctional":
        if isinstance(kind, (cls, BalanceFunctional)):
            return kind
        try:
            return cls(str(kind).lower())
        except ValueError:
            raise ValueError(f"unknown cut kind {kind!r}") from None


@dataclass(frozen=True)
class BalanceFunctional:
    """User-defined balancing term.

    Parameters
    ----------
    name : str
    balance : callable
        ``balance(sizes, vol_in, vol_out, vol_total) -> array`` evaluated
        elementwise on broadcastable arrays; ``sizes`` is ``|S|`` and the
        complement size is ``m - |S|`` with ``m`` passed as keyword.
    gradient : callable, optional
        ``gradient(g, mask) -> ndarray`` giving the derivative of the
        balancing term with respect to the node masses of a population
        graph. Needed only for limit distributions.
    """

    name: str
    balance: Callable
    gradient: Callable | None = None


def _balance(kind, size, vol_in, vol_out, m):
    if isinstance(kind, BalanceFunctional):
        return kind.balance(size, vol_in, vol_out, vol_in + vol_out, m=m)
    if kind is CutKind.MCUT:
        return np.ones_like(vol_in)
    if kind is CutKind.RCUT:
        return np.broadcast_to(size * (m - size), vol_in.shape).astype(float)
    if kind is CutKind.NCUT:
        return vol_in * vol_out
    if kind is CutKind.NCUTALT:
        total = vol_in + vol_out
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(total > 0, vol_in * vol_out / total, 0.0)
    if kind is CutKind.CCUT:
        return np.minimum(vol_in, vol_out)
    raise ValueError(f"unknown cut kind {kind!r}")


def crossing_matrix(masks: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """``(P, E)`` indicator of edges crossing each partition."""
    return (masks[:, edges[:, 0]] != masks[:, edges[:, 1]]).astype(float)


def batch_cut_values(kind, edge_weights, degrees, masks, edges, *, cross=None,
                     return_parts=False):
    """Cut objectives for many graphs on a common edge set and many partitions.

    Parameters
    ----------
    edge_weights : ndarray, shape (R, E)
    degrees : ndarray, shape (R, m)
    masks : ndarray of bool, shape (P, m)
    edges : ndarray, shape (E, 2)
    cross : ndarray, optional
        Precomputed ``crossing_matrix(masks, edges)``.

    Returns
    -------
    ndarray, shape (R, P)
        Objective values, NaN where the balancing term vanishes.
    """
    kind = CutKind.parse(kind)
    ew = np.atleast_2d(edge_weights)
    deg = np.atleast_2d(degrees)
    mf = masks.astype(float)
    if cross is None:
        cross = crossing_matrix(masks, edges)
    cut = ew @ cross.T
    vol_in = deg @ mf.T
    vol_out = deg @ (1.0 - mf).T
    size = masks.sum(axis=1)[None, :]
    bal = _balance(kind, size, vol_in, vol_out, masks.shape[1])
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.where(bal > 0, cut / np.where(bal > 0, bal, 1.0), np.nan)
    if return_parts:
        return val, cut, vol_in, vol_out
    return val


def cut_weight(g: WeightedGraph, S) -> float:
    """Total weight of edges crossing ``S``."""
    mask = as_mask(S, g.m)
    return float(g.weights[np.ix_(mask, ~mask)].sum())


def cut_value(g: WeightedGraph, S, kind) -> float:
    """Balanced cut objective of ``S`` on ``g``.

    Raises
    ------
    DegeneratePartitionError
        If the balancing term is zero.
    """
    kind = CutKind.parse(kind)
    mask = as_mask(S, g.m)
    if mask.all() or not mask.any():
        raise DegeneratePartitionError("both sides of the partition must be nonempty")
    val = batch_cut_values(kind, g.edge_weights[None], g.degrees[None],
                           mask[None], g.edges)[0, 0]
    if np.isnan(val):
        raise DegeneratePartitionError(f"balancing term of {kind} vanishes on this partition")
    return float(val)


def partition_masks(m: int, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """All ``2**(m-1) - 1`` canonical partitions as a boolean ``(P, m)`` array.

    Row ``r`` has node 0 inside and the bits of ``r + 1`` marking the nodes
    ``1..m-1`` placed outside, so row order equals ``Partition.code`` order.
    """
    if m < 2:
        raise ValueError("need at least two nodes")
    if m > cap:
        raise EnumerationCapError(
            f"{m} nodes exceed the enumeration cap of {cap}; use xist instead")
    codes = np.arange(1, 2 ** (m - 1), dtype=np.int64)
    bits = (codes[:, None] >> np.arange(m - 1)) & 1
    masks = np.ones((codes.size, m), dtype=bool)
    masks[:, 1:] = bits == 0
    return masks


@dataclass(frozen=True)
class CutReport:
    """Minimum of a cut objective with all partitions within tolerance."""

    kind: CutKind
    value: float
    minimizers: tuple[Partition, ...]
    tolerance: float = DEFAULT_TOLERANCE
    skipped: tuple[Partition, ...] = field(default=())

    @property
    def best(self) -> Partition:
        return self.minimizers[0]

    def to_dict(self) -> dict:
        name = self.kind.value if isinstance(self.kind, CutKind) else self.kind.name
        return {
            "kind": name,
            "value": self.value,
            "minimizers": [list(s.members) for s in self.minimizers],
            "tolerance": self.tolerance,
            "skipped": [list(s.members) for s in self.skipped],
        }


def minimizer_indices(values: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> np.ndarray:
    """Indices of the entries within ``tol * (1 + |min|)`` of the minimum, NaN ignored."""
    best = np.nanmin(values)
    return np.flatnonzero(values <= best + tol * (1 + abs(best)))


def min_cut_exact(g: WeightedGraph, kind, tol: float = DEFAULT_TOLERANCE,
                  cap: int = ENUMERATION_CAP) -> CutReport:
    """Global minimum over all two-way partitions by enumeration."""
    kind = CutKind.parse(kind)
    masks = partition_masks(g.m, cap)
    vals = batch_cut_values(kind, g.edge_weights[None], g.degrees[None], masks, g.edges)[0]
    bad = np.isnan(vals)
    if bad.all():
        raise DegeneratePartitionError("every partition has a vanishing balancing term")
    idx = minimizer_indices(vals, tol)
    return CutReport(
        kind,
        float(np.min(vals[idx])),
        tuple(Partition.of(masks[i], g.m) for i in idx),
        tol,
        tuple(Partition.of(masks[i], g.m) for i in np.flatnonzero(bad)),
    )


@dataclass(frozen=True)
class MultiPartition:
    """Split of the nodes into ``k`` nonempty blocks, ordered by smallest member."""

    blocks: tuple[tuple[int, ...], ...]
    m: int

    @classmethod
    def of(cls, blocks, m: int) -> "MultiPartition":
        seen = np.zeros(m, dtype=int)
        out = []
        for b in blocks:
            b = tuple(sorted(int(i) for i in b))
            if not b:
                raise ValueError("blocks must be nonempty")
            if b[0] < 0 or b[-1] >= m:
                raise ValueError("node index out of range")
            seen[list(b)] += 1
            out.append(b)
        if np.any(seen > 1):
            raise ValueError("blocks overlap")
        if np.any(seen == 0):
            raise ValueError("blocks do not cover all nodes")
        if len(out) < 2:
            raise ValueError("need at least two blocks")
        return cls(tuple(sorted(out)), m)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def masks(self) -> np.ndarray:
        out = np.zeros((self.k, self.m), dtype=bool)
        for r, b in enumerate(self.blocks):
            out[r, list(b)] = True
        return out


def multiway_cut_value(g: WeightedGraph, parts, kind) -> float:
    """Half the sum of the two-way objectives of each block."""
    kind = CutKind.parse(kind)
    if not isinstance(parts, MultiPartition):
        parts = MultiPartition.of(parts, g.m)
    vals = batch_cut_values(kind, g.edge_weights[None], g.degrees[None],
                            parts.masks(), g.edges)[0]
    if np.isnan(vals).any():
        raise DegeneratePartitionError("a block has a vanishing balancing term")
    return 0.5 * float(vals.sum())


def stirling2(m: int, k: int) -> int:
    """Number of ways to split ``m`` labelled nodes into ``k`` nonempty blocks."""
    row = [1] + [0] * k
    for i in range(1, m + 1):
        new = [0] * (k + 1)
        for j in range(1, min(i, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def set_partitions(m: int, k: int):
    """Restricted growth strings of length ``m`` using exactly ``k`` labels."""
    labels = [0] * m

    def rec(i, used):
        if m - i < k - used:
            return
        if i == m:
            if used == k:
                yield tuple(labels)
            return
        for lab in range(min(used + 1, k)):
            labels[i] = lab
            yield from rec(i + 1, max(used, lab + 1))

    if m >= k >= 1:
        labels[0] = 0
        yield from rec(1, 1)


def multiway_min_exact(g: WeightedGraph, k: int, kind, tol: float = DEFAULT_TOLERANCE,
                       cap: int = 2_000_000) -> CutReport:
    """Minimum ``k``-way objective over all set partitions into ``k`` blocks."""
    kind = CutKind.parse(kind)
    if k < 2 or k > g.m:
        raise ValueError("k must lie between 2 and the number of nodes")
    count = stirling2(g.m, k)
    if count > cap:
        raise EnumerationCapError(f"{count} candidate {k}-partitions exceed the cap of {cap}")
    labels = np.array(list(set_partitions(g.m, k)), dtype=np.int64)
    # score every distinct block once, then sum per k-partition
    codes = np.zeros((labels.shape[0], k), dtype=np.int64)
    weights = 1 << np.arange(g.m, dtype=np.int64)
    for lab in range(k):
        codes[:, lab] = ((labels == lab) * weights).sum(axis=1)
    uniq, inv = np.unique(codes, return_inverse=True)
    block_masks = ((uniq[:, None] >> np.arange(g.m)) & 1).astype(bool)
    block_vals = batch_cut_values(kind, g.edge_weights[None], g.degrees[None],
                                  block_masks, g.edges)[0]
    totals = 0.5 * block_vals[inv.reshape(codes.shape)].sum(axis=1)
    if np.isnan(totals).all():
        raise DegeneratePartitionError("every k-partition has a degenerate block")
    idx = minimizer_indices(totals, tol)

    def as_multi(row):
        return MultiPartition.of([np.flatnonzero(row == lab) for lab in range(k)], g.m)

    return CutReport(kind, float(np.min(totals[idx])),
                     tuple(as_multi(labels[i]) for i in idx), tol,
                     tuple(as_multi(labels[i]) for i in np.flatnonzero(np.isnan(totals))))

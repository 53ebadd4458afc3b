"""Kolmogorov-Smirnov distances, QQ tables and the asymptotic clustering test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cuts import CutKind, min_cut_exact
from .discretization import DiscretizedSample, ProbabilityGrid, named_distribution
from .graph import empirical_graph, population_graph
from .asymptotics import limit_sampler


def _clean(sample, name):
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size == 0:
        raise ValueError(f"{name} is empty")
    if np.isnan(x).any():
        raise ValueError(f"{name} contains NaN")
    return x


def ks_distance(sample_a, sample_b) -> float:
    """Sup-distance between the two empirical CDFs, exact over all jump points."""
    a = _clean(sample_a, "sample_a")
    b = _clean(sample_b, "sample_b")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_distance_to_samples_cdf(sample, reference_draws) -> float:
    """Distance from the ECDF of ``sample`` to the CDF estimated by ``reference_draws``."""
    return ks_distance(sample, reference_draws)


def kolmogorov_cdf(x: float, terms: int = 200) -> float:
    """``K(x) = 1 - 2 sum_k (-1)^(k-1) exp(-2 k^2 x^2)``."""
    if x <= 0:
        return 0.0
    k = np.arange(1, terms + 1)
    return float(1 - 2 * np.sum((-1.0) ** (k - 1) * np.exp(-2 * k ** 2 * x * x)))


def kolmogorov_quantile(alpha: float) -> float:
    """Upper ``alpha`` quantile ``q`` with ``K(q) = 1 - alpha``, by bisection."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    lo, hi = 1e-3, 1.0
    while kolmogorov_cdf(hi) < 1 - alpha:
        hi *= 2
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if kolmogorov_cdf(mid) < 1 - alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class KsReport:
    """KS distance with its asymptotic critical value.

    ``critical`` is ``q_{1-alpha} / sqrt(n_eff)``. With ``two_sample`` the
    effective size is ``n_a n_b / (n_a + n_b)``; otherwise it is the size of
    the first sample and the reference is treated as the exact CDF.
    """

    D: float
    n_eff: float
    critical: float
    alpha: float
    reject: bool


def ks_test(sample, reference, alpha: float = 0.05, two_sample: bool = False) -> KsReport:
    a = _clean(sample, "sample")
    b = _clean(reference, "reference")
    D = ks_distance(a, b)
    n_eff = a.size * b.size / (a.size + b.size) if two_sample else float(a.size)
    crit = kolmogorov_quantile(alpha) / math.sqrt(n_eff)
    return KsReport(D, n_eff, crit, alpha, D > crit)


def qq_data(sample, reference_draws, n_quantiles: int = 99,
            lower: float = 0.0, upper: float = 1.0) -> np.ndarray:
    """Paired quantiles at equally spaced levels.

    Returns
    -------
    ndarray, shape (n_quantiles, 3)
        Columns are level, quantile of ``sample``, quantile of the reference,
        both with linear (type 7) interpolation.
    """
    if n_quantiles < 2:
        raise ValueError("need at least two quantile levels")
    a = _clean(sample, "sample")
    b = _clean(reference_draws, "reference_draws")
    levels = np.linspace(lower, upper, n_quantiles)
    return np.column_stack([levels, np.quantile(a, levels, method="linear"),
                            np.quantile(b, levels, method="linear")])


@dataclass(frozen=True)
class ClusterTestReport:
    """Outcome of the test of ``XC(G) = XC(G_unif)``.

    Attributes
    ----------
    statistic : float
        Optimal cut value of the empirical graph.
    lo, hi : float
        Acceptance band.
    reject : bool
    alpha : float
    quantiles : tuple of float
        Reference limit quantiles at ``alpha / 2`` and ``1 - alpha / 2``.
    reference_value : float
        Optimal cut value of the reference population graph.
    degenerate : bool
        True when every reference draw is equal, so the band is a point.
    """

    statistic: float
    lo: float
    hi: float
    reject: bool
    alpha: float
    quantiles: tuple[float, float]
    reference_value: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return dict(statistic=self.statistic, lo=self.lo, hi=self.hi, reject=self.reject,
                    alpha=self.alpha, quantiles=list(self.quantiles),
                    reference_value=self.reference_value, degenerate=self.degenerate)


@dataclass(frozen=True)
class ReferenceLimit:
    """Optimal value and limit draws of the reference distribution, reusable across tests."""

    value: float
    draws: np.ndarray

    @classmethod
    def build(cls, ref_grid: ProbabilityGrid, t: float, kind, draws: int, seed) -> "ReferenceLimit":
        pop = population_graph(ref_grid, t)
        report = min_cut_exact(pop, kind)
        return cls(report.value, limit_sampler(kind, pop, report, draws, seed))


def clustering_test(sample: DiscretizedSample, grid: ProbabilityGrid, t: float, kind,
                    alpha: float = 0.05, ref_grid: ProbabilityGrid | None = None,
                    draws: int = 50_000, seed=0,
                    reference: ReferenceLimit | None = None) -> ClusterTestReport:
    """Reject when the empirical optimal cut leaves the asymptotic band.

    The band is ``XC(G_ref) + Q(alpha/2) / sqrt(n)`` to
    ``XC(G_ref) + Q(1 - alpha/2) / sqrt(n)``, with ``Q`` estimated from
    ``draws`` limit draws on the reference grid (uniform by default).
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    kind = CutKind.parse(kind)
    if reference is None:
        if ref_grid is None:
            ref_grid = named_distribution("uniform", shape=grid.shape)
        reference = ReferenceLimit.build(ref_grid, t, kind, draws, seed)
    stat = min_cut_exact(empirical_graph(sample, grid, t), kind).value
    ql, qh = np.quantile(reference.draws, [alpha / 2, 1 - alpha / 2], method="linear")
    root = math.sqrt(sample.n)
    lo = reference.value + ql / root
    hi = reference.value + qh / root
    degenerate = bool(np.all(reference.draws == reference.draws[0]))
    return ClusterTestReport(stat, float(lo), float(hi), bool(stat < lo or stat > hi),
                             alpha, (float(ql), float(qh)), reference.value, degenerate)

"""Empirical spectral distributions and theory-vs-simulation comparison."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .densities import DensitySpec
from .seeding import Seed


@dataclass(frozen=True)
class ESD:
    """Empirical spectral distribution: sorted eigenvalues plus provenance."""

    eigenvalues: np.ndarray
    source_dim: int
    trial_seed: Optional[Seed] = None

    def __post_init__(self):
        values = np.asarray(self.eigenvalues, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("eigenvalues must be one-dimensional")
        if np.any(np.diff(values) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        object.__setattr__(self, "eigenvalues", values)

    @property
    def count(self) -> int:
        return int(self.eigenvalues.size)


def esd_from_spectrum(values: np.ndarray, seed: Optional[Seed] = None) -> ESD:
    """Wrap a spectrum (ascending reals) as an ESD."""
    values = np.sort(np.asarray(values, dtype=np.float64))
    return ESD(eigenvalues=values, source_dim=values.size, trial_seed=seed)


def pool_esds(esds: Sequence[ESD]) -> ESD:
    """Union of the sample multisets; the pooled count is the sum of counts."""
    if not esds:
        raise ValueError("need at least one ESD")
    merged = np.sort(np.concatenate([e.eigenvalues for e in esds]))
    return ESD(eigenvalues=merged, source_dim=esds[0].source_dim, trial_seed=None)


def empirical_moments(esd: ESD, p_max: int) -> "list[float]":
    """Mean of eigenvalue^p for p = 1..p_max."""
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    lam = esd.eigenvalues
    return [float(np.mean(lam**p)) for p in range(1, p_max + 1)]


@dataclass(frozen=True)
class KSReport:
    """Kolmogorov-Smirnov distance of an ESD to a target law."""

    statistic: float
    target: DensitySpec
    sample_size: int


def ks_distance(esd: ESD, target: DensitySpec) -> KSReport:
    """sup-norm distance between the empirical CDF and the target CDF.

    Evaluated at both one-sided limits of every sample point, which is
    where the supremum of the difference with a continuous CDF occurs.
    """
    lam = esd.eigenvalues
    m = lam.size
    if m == 0:
        raise ValueError("empty sample")
    cdf_vals = np.array([target.cdf(float(x)) for x in lam])
    upper = np.arange(1, m + 1) / m
    lower = np.arange(0, m) / m
    statistic = float(max(np.max(np.abs(cdf_vals - upper)), np.max(np.abs(cdf_vals - lower))))
    return KSReport(statistic=statistic, target=target, sample_size=m)


def moment_statistics(esds: Sequence[ESD], p_max: int):
    """Across-trial mean, standard error and variance of per-trial moments.

    Returns three length-p_max lists. The standard error is the one of the
    across-trial mean (0.0 for a single trial); the variance is the plain
    sample variance of the per-trial normalized moments, the quantity whose
    decay witnesses convergence in probability.
    """
    if not esds:
        raise ValueError("need at least one ESD")
    per_trial = np.array([empirical_moments(e, p_max) for e in esds])
    mean = per_trial.mean(axis=0)
    k = per_trial.shape[0]
    if k > 1:
        var = per_trial.var(axis=0, ddof=1)
        stderr = np.sqrt(var / k)
    else:
        var = np.zeros(p_max)
        stderr = np.zeros(p_max)
    return list(map(float, mean)), list(map(float, stderr)), list(map(float, var))


def aggregate_trials(esds: Sequence[ESD], p_max: int):
    """Pooled ESD plus the across-trial variance of each normalized moment."""
    if len(esds) < 2:
        raise ValueError("aggregation needs at least 2 trials")
    _, _, variances = moment_statistics(esds, p_max)
    return pool_esds(esds), variances


@dataclass(frozen=True)
class MomentReport:
    """Empirical moments (pooled over trials) against predictions."""

    orders: tuple
    empirical: tuple
    empirical_stderr: tuple
    predicted: tuple
    regime: str

    def __post_init__(self):
        k = len(self.orders)
        if not (len(self.empirical) == len(self.empirical_stderr) == len(self.predicted) == k):
            raise ValueError("all report columns must have equal length")
        if any(s < 0 for s in self.empirical_stderr):
            raise ValueError("standard errors must be nonnegative")


@dataclass(frozen=True)
class ComparisonRow:
    order: int
    empirical: float
    predicted: float
    stderr: float
    tolerance: float
    passed: bool


def compare_report(report: MomentReport, tolerances: Sequence[float]) -> "list[ComparisonRow]":
    """Per-order pass/fail: |empirical - predicted| <= tolerance + 3 stderr."""
    if len(tolerances) != len(report.orders):
        raise ValueError("need one tolerance per order")
    rows = []
    for order, emp, pred, se, tol in zip(
        report.orders, report.empirical, report.predicted, report.empirical_stderr, tolerances
    ):
        gap = abs(emp - pred)
        rows.append(
            ComparisonRow(
                order=order,
                empirical=emp,
                predicted=pred,
                stderr=se,
                tolerance=tol,
                passed=bool(gap <= tol + 3.0 * se),
            )
        )
    return rows


def histogram_rows(esd: ESD, bins: int):
    """Histogram of the ESD: (bin_left, bin_right, count, density) rows."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts, edges = np.histogram(esd.eigenvalues, bins=bins)
    total = esd.eigenvalues.size
    rows = []
    for k in range(bins):
        width = edges[k + 1] - edges[k]
        density = counts[k] / (total * width) if width > 0 else 0.0
        rows.append((float(edges[k]), float(edges[k + 1]), int(counts[k]), float(density)))
    return rows

"""Distribution comparison and summaries: two-sample KS, mean/SD and Gaussian KDE."""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import ks_2samp, kstwobign, norm

from src.core.constants import KDE_EXTEND_BANDWIDTHS, KDE_GRID_POINTS, KS_SERIES_CUTOFF
from src.core.validators import ArgumentError, DegenerateDistributionError
from src.services.diversity import SampleSeries

Values = SampleSeries | Sequence[float] | np.ndarray


@dataclass(frozen=True)
class KsResult:
    d: float
    p: float
    n1: int
    n2: int


@dataclass(frozen=True)
class MeanSd:
    mean: float
    sd: float


@dataclass(frozen=True)
class KdeCurve:
    x: tuple[float, ...]
    density: tuple[float, ...]
    bandwidth: float

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x, self.density))


def _as_array(values: Values, name: str) -> np.ndarray:
    raw = values.values if isinstance(values, SampleSeries) else values
    array = np.asarray(raw, dtype=float)
    if array.ndim != 1 or array.size == 0:
        raise ArgumentError(f"{name} must be a non-empty series")
    return array


def kolmogorov_sf(lam: float) -> float:
    """P(K > lam) for the Kolmogorov distribution: 2 * sum (-1)^(k-1) exp(-2 k^2 lam^2), cut below 1e-12."""
    if lam <= 0:
        return 1.0
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < KS_SERIES_CUTOFF:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(a: Values, b: Values) -> KsResult:
    """
    Two-sample Kolmogorov-Smirnov test.

    D is the largest gap between the two empirical CDFs over the pooled
    sample points (ties included); p comes from the asymptotic Kolmogorov
    distribution at sqrt(n1 n2 / (n1 + n2)) * D.
    """
    x, y = _as_array(a, "first sample"), _as_array(b, "second sample")
    d = float(ks_2samp(x, y, method="asymp").statistic)
    n1, n2 = x.size, y.size
    p = float(kstwobign.sf(math.sqrt(n1 * n2 / (n1 + n2)) * d))
    return KsResult(d=d, p=min(1.0, max(0.0, p)), n1=n1, n2=n2)


def mean_sd(values: Values) -> MeanSd:
    """Arithmetic mean and population SD."""
    array = _as_array(values, "values")
    return MeanSd(mean=float(np.mean(array)), sd=float(np.std(array)))


def silverman_bandwidth(values: Values) -> float:
    """0.9 * min(SD, IQR / 1.34) * n^(-1/5), falling back to SD when the IQR is zero."""
    array = _as_array(values, "values")
    if array.size < 2:
        raise ArgumentError("bandwidth selection needs at least 2 values")
    sd = float(np.std(array, ddof=1))
    q75, q25 = np.percentile(array, [75, 25])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    if spread <= 0:
        raise DegenerateDistributionError("all values are identical")
    return 0.9 * spread * array.size ** (-0.2)


def kde(values: Values, bandwidth: float | None = None) -> KdeCurve:
    """Gaussian kernel density on evenly spaced points over [min - 3h, max + 3h]."""
    array = _as_array(values, "values")
    if array.size < 2:
        raise ArgumentError("density estimation needs at least 2 values")
    if np.ptp(array) == 0:
        raise DegenerateDistributionError("all values are identical")
    h = silverman_bandwidth(array) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise ArgumentError(f"bandwidth must be > 0 (got {bandwidth})")
    margin = KDE_EXTEND_BANDWIDTHS * h
    grid = np.linspace(array.min() - margin, array.max() + margin, KDE_GRID_POINTS)
    density = norm.pdf((grid[:, None] - array[None, :]) / h).sum(axis=1) / (array.size * h)
    return KdeCurve(x=tuple(grid.tolist()), density=tuple(density.tolist()), bandwidth=h)

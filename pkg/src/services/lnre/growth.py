"""Model-based vocabulary growth: extrapolation and Z tests between corpora."""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from scipy.stats import norm

from src.core.constants import EXTRAPOLATION_FACTOR, GROWTH_CHECKPOINTS
from src.core.protocols import SpectrumLike
from src.core.types import CurveKind
from src.core.validators import ArgumentError, UndefinedStatisticError
from src.services.diversity import GrowthCurve, GrowthPoint
from src.services.lnre.models import LnreModel


@dataclass(frozen=True)
class ZTest:
    z: float
    p: float


def growth_checkpoints(
    N: float, factor: float = EXTRAPOLATION_FACTOR, count: int = GROWTH_CHECKPOINTS
) -> list[int]:
    """Evenly spaced sample sizes from N/count up to factor * N; N itself is always included."""
    step = max(1, math.ceil(N / count))
    points = set(range(step, int(factor * N) + 1, step))
    points.add(int(N))
    return sorted(p for p in points if p > 0)


def _require_fitted(model: LnreModel, spectrum: Optional[SpectrumLike] = None) -> float:
    if model.N is None:
        raise ArgumentError(f"{model.family.label} model has not been fitted")
    if spectrum is not None and model.N != spectrum.N:
        raise ArgumentError(f"model fitted at N={model.N} but spectrum has N={spectrum.N}")
    return model.N


def extrapolate_growth(model: LnreModel, checkpoints: Sequence[int]) -> GrowthCurve:
    """Expected V, V1, V2 at each positive checkpoint; interpolated up to the fitted N, extrapolated beyond."""
    fitted_N = _require_fitted(model)
    points = []
    for n in checkpoints:
        if n <= 0:
            continue
        spectrum = model.expected_spectrum_array(n, 2)
        kind = CurveKind.INTERPOLATED if n <= fitted_N else CurveKind.EXTRAPOLATED
        points.append(GrowthPoint(int(n), model.expected_vocabulary(n), float(spectrum[0]), float(spectrum[1]), kind))
    return GrowthCurve.of(points)


def _z_test(difference: float, variance: float) -> ZTest:
    if not variance > 0 or not math.isfinite(variance):
        raise UndefinedStatisticError(f"combined variance is {variance}")
    z = difference / math.sqrt(variance)
    return ZTest(z=z, p=float(2 * norm.sf(abs(z))))


def compare_growth_z(
    model_a: LnreModel, spectrum_a: SpectrumLike, model_b: LnreModel, spectrum_b: SpectrumLike
) -> ZTest:
    """Z statistic for the difference of hapax growth rates V1/N, with model-based variances."""
    n_a, n_b = _require_fitted(model_a, spectrum_a), _require_fitted(model_b, spectrum_b)
    g_a, g_b = spectrum_a.vm(1) / n_a, spectrum_b.vm(1) / n_b
    variance = model_a.variance_spectrum(1, n_a) / n_a**2 + model_b.variance_spectrum(1, n_b) / n_b**2
    return _z_test(g_a - g_b, variance)


def compare_vocabulary_z(
    model_a: LnreModel, spectrum_a: SpectrumLike, model_b: LnreModel, spectrum_b: SpectrumLike
) -> ZTest:
    """Z statistic for the difference of vocabulary sizes, with model-based variances."""
    n_a, n_b = _require_fitted(model_a, spectrum_a), _require_fitted(model_b, spectrum_b)
    variance = model_a.variance_vocabulary(n_a) + model_b.variance_vocabulary(n_b)
    return _z_test(spectrum_a.V - spectrum_b.V, variance)

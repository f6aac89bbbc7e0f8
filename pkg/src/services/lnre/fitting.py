"""Chi-square fitting of LNRE models to an observed frequency spectrum."""

from dataclasses import replace
from typing import Iterable, Optional, Type

import numpy as np
from scipy.optimize import OptimizeResult, minimize
from scipy.special import gammaincc

from src.core.constants import (
    FAMILY_FALLBACK_ORDER,
    FIT_MAX_CLASS,
    FIT_MAX_EVALUATIONS,
    FIT_MIN_CLASS_COUNT,
    FIT_SIMPLEX_TOLERANCE,
)
from src.core.logger import logger
from src.core.protocols import SpectrumLike
from src.core.types import ModelFamily
from src.core.validators import ArgumentError, FittingError, NumericError
from src.services.lnre.models import MODEL_FAMILIES, FitRecord, LnreModel

# Objective value returned for parameter vectors outside the model's domain.
_PENALTY = 1e100


def merge_classes(counts: np.ndarray, min_count: float = FIT_MIN_CLASS_COUNT) -> list[list[int]]:
    """Group frequency classes 1..len(counts), folding trailing sparse classes into the last kept one."""
    groups = [[m] for m in range(1, len(counts) + 1)]
    while len(groups) > 1 and sum(counts[m - 1] for m in groups[-1]) < min_count:
        tail = groups.pop()
        groups[-1].extend(tail)
    return groups


class ChiSquareObjective:
    """Multivariate chi-square of observed (V, V1..Vk) against a model, under the model's covariance."""

    def __init__(self, spectrum: SpectrumLike, max_class: int = FIT_MAX_CLASS, min_count: float = FIT_MIN_CLASS_COUNT):
        self.N = spectrum.N
        self.max_class = max_class
        observed = np.array([spectrum.V] + [spectrum.vm(m) for m in range(1, max_class + 1)], dtype=float)
        self.groups = merge_classes(observed[1:], min_count)
        self.aggregate = np.zeros((len(self.groups) + 1, max_class + 1))
        self.aggregate[0, 0] = 1.0
        for row, group in enumerate(self.groups, 1):
            self.aggregate[row, group] = 1.0
        self.observed = self.aggregate @ observed

    @property
    def n_classes(self) -> int:
        return self.aggregate.shape[0]

    def __call__(self, model: LnreModel) -> float:
        expected = np.concatenate(
            ([model.expected_vocabulary(self.N)], model.expected_spectrum_array(self.N, self.max_class))
        )
        cov = self.aggregate @ model.covariance_matrix(self.N, self.max_class) @ self.aggregate.T
        residual = self.observed - self.aggregate @ expected
        return float(residual @ np.linalg.solve(cov, residual))


def _simplex_diameter(simplex: np.ndarray) -> float:
    return float(max(np.max(np.abs(simplex - vertex)) for vertex in simplex))


def _describe(model_cls: Type[LnreModel], x: np.ndarray) -> dict[str, float]:
    try:
        return model_cls.from_free(x).params
    except (ArgumentError, OverflowError):
        return {f"x{i}": float(v) for i, v in enumerate(x)}


def _check_fittable(spectrum: SpectrumLike) -> None:
    if spectrum.V < 2:
        raise ArgumentError(f"fitting needs V >= 2 (got V={spectrum.V})")
    head = [spectrum.vm(m) for m in range(1, FIT_MAX_CLASS + 1)]
    nonempty = sum(1 for v in head if v > 0) + (1 if spectrum.V - sum(head) > 1e-9 else 0)
    if nonempty < 3:
        raise ArgumentError(f"fitting needs at least 3 non-empty frequency classes (got {nonempty})")


def fit(spectrum: SpectrumLike, family: ModelFamily | str = ModelFamily.GIGP) -> LnreModel:
    """Fit one model family by simplex search from a deterministic multi-start grid."""
    family = ModelFamily(family)
    model_cls = MODEL_FAMILIES[family]
    _check_fittable(spectrum)
    objective = ChiSquareObjective(spectrum)

    def evaluate(x: np.ndarray) -> float:
        try:
            value = objective(model_cls.from_free(x))
        except (ArgumentError, NumericError, OverflowError, np.linalg.LinAlgError):
            return _PENALTY
        return value if np.isfinite(value) and value >= 0 else _PENALTY

    runs: list[tuple[OptimizeResult, float]] = []
    for i, start in enumerate(model_cls.start_points(spectrum.N, spectrum.V)):
        result = minimize(
            evaluate,
            start.free_parameters(),
            method="Nelder-Mead",
            options={
                "xatol": FIT_SIMPLEX_TOLERANCE,
                "fatol": FIT_SIMPLEX_TOLERANCE,
                "maxfev": FIT_MAX_EVALUATIONS,
                "maxiter": FIT_MAX_EVALUATIONS,
            },
        )
        diameter = _simplex_diameter(result.final_simplex[0])
        logger.debug(
            f"[lnre] {family.label} start {i}: chisq={result.fun:.6g} evaluations={result.nfev} "
            f"diameter={diameter:.3g} converged={result.success}"
        )
        runs.append((result, diameter))

    converged = [run for run in runs if run[0].success and run[0].fun < _PENALTY]
    if not converged:
        best, diameter = min(runs, key=lambda run: run[0].fun)
        raise FittingError(
            f"{family.label} simplex search did not converge within {FIT_MAX_EVALUATIONS} evaluations",
            best_params=_describe(model_cls, best.x),
            simplex_diameter=diameter,
            chisq=float(best.fun),
        )

    best, _ = min(converged, key=lambda run: run[0].fun)
    model = model_cls.from_free(best.x)
    chisq = max(0.0, objective(model))
    df = objective.n_classes - len(model_cls.parameter_names)
    p: Optional[float] = float(gammaincc(df / 2, chisq / 2)) if df > 0 else None
    if p is None:
        logger.warning(f"[lnre] {family.label}: no degrees of freedom left ({objective.n_classes} classes)")
    logger.info(f"[lnre] {family.label} fitted: {model.params} chisq={chisq:.4g} df={df}")
    return replace(model, N=spectrum.N, fit=FitRecord(chisq=chisq, df=df, p=p))


def fit_with_fallback(
    spectrum: SpectrumLike, families: Iterable[ModelFamily | str] = FAMILY_FALLBACK_ORDER
) -> LnreModel:
    """Fit the first family that converges, trying the rest in order."""
    families = [ModelFamily(f) for f in families]
    if not families:
        raise ArgumentError("no model family to fit")
    failure: Optional[NumericError] = None
    for family in families:
        try:
            return fit(spectrum, family)
        except NumericError as e:
            failure = e
            logger.warning(f"[lnre] {family.label} fit failed ({e}); trying next family")
    assert failure is not None
    raise failure

"""LNRE models, fitting and growth extrapolation."""

from src.services.lnre.fitting import ChiSquareObjective, fit, fit_with_fallback, merge_classes
from src.services.lnre.growth import (
    ZTest,
    compare_growth_z,
    compare_vocabulary_z,
    extrapolate_growth,
    growth_checkpoints,
)
from src.services.lnre.models import (
    MODEL_FAMILIES,
    ExpectedSpectrum,
    FiniteZipfMandelbrot,
    FitRecord,
    GeneralizedInverseGaussPoisson,
    LnreModel,
    ZipfMandelbrot,
    integrate_density,
)

__all__ = [
    "ChiSquareObjective",
    "ExpectedSpectrum",
    "FiniteZipfMandelbrot",
    "FitRecord",
    "GeneralizedInverseGaussPoisson",
    "LnreModel",
    "MODEL_FAMILIES",
    "ZTest",
    "ZipfMandelbrot",
    "compare_growth_z",
    "compare_vocabulary_z",
    "extrapolate_growth",
    "fit",
    "fit_with_fallback",
    "growth_checkpoints",
    "integrate_density",
    "merge_classes",
]

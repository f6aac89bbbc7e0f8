"""Core types and enums."""
from enum import Enum


class _ValueEnum(Enum):
    def __str__(self):
        return self.value


class TypeDefinition(_ValueEnum):
    """How a token is mapped to its type."""

    SURFACE = "surface"
    LEMMA = "lemma"


class InputFormat(_ValueEnum):
    """Corpus file formats."""

    AUTO = "auto"
    PLAIN = "plain"
    VERTICAL = "vertical"
    SPECTRUM = "spectrum"


class ModelFamily(_ValueEnum):
    """LNRE model families."""

    ZM = "zm"
    FZM = "fzm"
    GIGP = "gigp"

    @property
    def label(self) -> str:
        return {"zm": "ZM", "fzm": "fZM", "gigp": "GIGP"}[self.value]


class CurveKind(_ValueEnum):
    """Provenance of growth-curve points."""

    OBSERVED = "observed"
    INTERPOLATED = "interpolated"
    EXTRAPOLATED = "extrapolated"
    EXPECTED = "expected"


class PlotKind(_ValueEnum):
    """SVG plots the renderer can emit."""

    GROWTH = "growth"
    TTR_KDE = "ttr_kde"
    FLESCH_KDE = "flesch_kde"
    DLEVEL = "dlevel"


class ReadabilityMeasure(_ValueEnum):
    """Per-sample readability scores."""

    FLESCH = "flesch"
    FLESCH_KINCAID = "flesch_kincaid"

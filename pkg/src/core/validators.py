"""Validators - exception hierarchy and argument checks (exception-based)."""
from typing import Any, Optional


class ComplexityError(Exception):
    """Base class for every error raised by the toolkit."""

    pass


class ValidationError(ComplexityError, ValueError):
    """Raised when configuration or paths fail validation."""

    pass


class ArgumentError(ComplexityError, ValueError):
    """Raised when an operation receives an argument outside its domain."""

    pass


class IngestionError(ComplexityError):
    """Raised when a corpus file cannot be read or parsed."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        offset: Optional[int] = None,
    ):
        self.path = path
        self.line = line
        self.offset = offset
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if offset is not None:
            location.append(f"byte offset {offset}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class UndefinedMeasureError(ComplexityError):
    """Raised when a measure is undefined for the given input."""

    pass


class UndefinedStatisticError(ComplexityError):
    """Raised when a test statistic cannot be formed (e.g. zero variance)."""

    pass


class DegenerateDistributionError(ComplexityError):
    """Raised when a sample has no spread to smooth."""

    pass


class NumericError(ComplexityError):
    """Raised when a numeric routine fails; carries diagnostics."""

    def __init__(self, message: str, diagnostics: Optional[dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class FittingError(NumericError):
    """Raised when the simplex search does not converge."""

    def __init__(self, message: str, best_params: dict[str, float], simplex_diameter: float, **extra: Any):
        self.best_params = best_params
        self.simplex_diameter = simplex_diameter
        super().__init__(message, {"best_params": best_params, "simplex_diameter": simplex_diameter, **extra})


class RenderError(ComplexityError):
    """Raised when a plot lacks a required series."""

    def __init__(self, series: str, message: Optional[str] = None):
        self.series = series
        super().__init__(message or f"missing series: {series}")


def require_positive(name: str, value: int) -> None:
    """Raise ArgumentError unless value >= 1."""
    if value < 1:
        raise ArgumentError(f"{name} must be >= 1 (got {value})")


def require_non_empty(name: str, values) -> None:
    """Raise ArgumentError for an empty sequence."""
    if len(values) == 0:
        raise ArgumentError(f"{name} must not be empty")

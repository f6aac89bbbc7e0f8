"""Protocols for type-safe duck typing across services."""
from typing import Protocol


class SpectrumLike(Protocol):
    """Anything that exposes a frequency spectrum: integer observed or real-valued expected."""

    @property
    def N(self) -> float:
        ...

    @property
    def V(self) -> float:
        ...

    def vm(self, m: int) -> float:
        """Number of types occurring exactly m times. Returns 0 for empty classes."""
        ...

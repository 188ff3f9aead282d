"""Exact and Monte Carlo tools for correlations of high moments of Wigner matrices."""

from .errors import CapacityError, DomainError, NumericalError, RegimeError, ReportParseError, WignerCorrError

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "NumericalError",
    "RegimeError",
    "ReportParseError",
    "WignerCorrError",
    "__version__",
]

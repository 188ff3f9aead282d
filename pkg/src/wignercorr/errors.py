"""Exception hierarchy shared by all modules.

Each class maps to a distinct CLI exit code.
"""


class WignerCorrError(Exception):
    exit_code = 1


class CapacityError(WignerCorrError):
    """A requested computation exceeds a hard enumeration/degree cap."""

    exit_code = 3


class DomainError(WignerCorrError, ValueError):
    """Inputs outside the mathematical domain of an operation."""

    exit_code = 4


class RegimeError(DomainError):
    """Parameters violate a stated asymptotic regime (s^3 <= kappa n^2 etc.)."""

    exit_code = 4


class NumericalError(WignerCorrError, ArithmeticError):
    """Eigensolver non-convergence or too many overflowing samples."""

    exit_code = 5


class ReportParseError(WignerCorrError):
    exit_code = 6

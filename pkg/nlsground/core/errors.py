"""
Exception hierarchy shared by the numerical core and the command line.
"""
from typing import Any, List, Optional, Tuple


class NlsGroundError(Exception):
    """Base class for all nlsground errors."""


class InvalidInputError(NlsGroundError):
    """Raised for malformed grids, non-finite samples or mismatched shapes."""


class InvalidParamsError(NlsGroundError):
    """Raised when model or solver parameters are outside their admissible range."""


class OutOfModelError(InvalidParamsError):
    """Raised when sigma <= 0 reaches the existence classifier."""


class RegimeError(NlsGroundError):
    """Raised when an asymptotic formula is used outside its regime."""


class ExistenceViolation(NlsGroundError):
    """Raised when a ground state is requested where none exists."""


class LinearSolveError(NlsGroundError):
    """Raised when a time step system is not positive or an iterative solve fails."""


class QuadratureError(NlsGroundError):
    """Raised when a quadrature error estimate exceeds its tolerance."""


class UsageError(NlsGroundError):
    """Raised for command-line usage problems."""


class NotConverged(NlsGroundError):
    """Raised when an iteration stops at its budget; keeps the last state."""

    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result


class BracketError(NlsGroundError):
    """Raised when a root bracket cannot be established; keeps the scan trace."""

    def __init__(self, message: str, trace: Optional[List[Tuple[float, float]]] = None):
        super().__init__(message)
        self.trace = list(trace or [])

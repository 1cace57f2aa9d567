"""Exceptions and warnings raised by the sampling library."""

from typing import Optional


class SamplingError(Exception):
    """Base class for all library errors"""


class InvalidArgumentError(SamplingError, ValueError):
    """An argument violates an operation's precondition"""


class DomainError(SamplingError, ValueError):
    """A point lies outside the open interval ((N-2)/2, N/2)"""

    def __init__(self, x: float, lower: float, upper: float):
        self.x = x
        self.lower = lower
        self.upper = upper
        super().__init__(f"x={x} outside the open interval ({lower}, {upper})")


class SynthesisError(SamplingError):
    """Spectral inversion failed at a source grid point"""

    def __init__(self, message: str, x: Optional[float] = None):
        self.x = x
        super().__init__(message if x is None else f"{message} (at x={x:.12g})")


class NoFormulaError(SamplingError):
    """No interpolation formula exists for the requested parameters"""

    def __init__(self, message: str, case: Optional[str] = None):
        self.case = case
        super().__init__(message if case is None else f"{message} [{case}]")


class InvalidNodesError(NoFormulaError):
    """Two sampling nodes coincide modulo N"""


class FamilyMismatchError(InvalidArgumentError):
    """Samples and kernels were built from families of different size"""


class SpecFileError(SamplingError):
    """A family or signal spec file could not be parsed"""


class UnknownOperatorError(SpecFileError):
    """A family spec file names an operator type that does not exist"""


class KernelAccuracyWarning(UserWarning):
    """Kernel quadrature is under-resolved at the requested point"""

"""
Exception hierarchy shared by the algebra engines, services and CLI.
"""

from typing import Optional, Tuple


class ThetaOrbifoldError(Exception):
    """Base class for every error raised by this package"""
    pass


class ExactArithmeticError(ThetaOrbifoldError, ZeroDivisionError):
    """Division by zero or an impossible coercion in exact arithmetic"""
    pass


class NonUnitError(ThetaOrbifoldError):
    """Raised when inverting a series or jet whose leading part is not a unit"""
    pass


class StructureError(ThetaOrbifoldError):
    """Mismatched generator lists, jet shapes or table dimensions"""
    pass


class DomainError(ThetaOrbifoldError):
    """Argument outside the domain of an operation"""
    pass


class PoleError(ThetaOrbifoldError):
    """The two-variable exponential f has a pole at the requested torsion shift"""
    pass


class UnsupportedGroupError(ThetaOrbifoldError):
    """Operation not available for this kind of group"""
    pass


class NotACocycleError(ThetaOrbifoldError):
    """A 2-cochain failed the cocycle identity"""

    def __init__(self, message: str, witness: Optional[Tuple[int, int, int]] = None):
        super().__init__(message)
        self.witness = witness


class ResourceLimitError(ThetaOrbifoldError):
    """A size guard was exceeded"""
    pass


class InputError(ThetaOrbifoldError):
    """Invalid data file or run configuration"""

    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location

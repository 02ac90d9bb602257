"""Exception hierarchy shared by every module of the package."""


class RSError(Exception):
    """Base class for all package errors."""


class ParameterError(RSError, ValueError):
    """Invalid couplings or polynomial parameters."""


class ModeError(RSError, ValueError):
    """Operation called with couplings of the wrong mode."""


class DomainError(RSError, ValueError):
    """Argument outside the domain of a function."""


class DenominatorError(RSError, ZeroDivisionError):
    """A denominator factor of a series vanished."""

    def __init__(self, message, parameter=None, index=None):
        super().__init__(message)
        self.parameter = parameter
        self.index = index


class SingularityError(RSError, ValueError):
    """Evaluation point too close to a pole of a coefficient function."""


class ChamberError(RSError, ValueError):
    """Positions outside the open ordered chamber."""


class RootCountError(RSError, RuntimeError):
    """Sign-change scan found the wrong number of zeros."""


class ConvergenceError(RSError, RuntimeError):
    """Iterative solver failed to converge."""


class QuadratureError(RSError, RuntimeError):
    """Quadrature-based Gram matrix is numerically singular."""

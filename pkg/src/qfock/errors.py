"""Exception types raised across the package."""


class QFockError(Exception):
    """Base class for library errors."""


class DomainError(QFockError, ValueError):
    """An argument lies outside the region where the object is defined."""


class PoleError(DomainError):
    """A rational function was evaluated at a zero of its denominator."""


class UnsupportedError(QFockError, ValueError):
    """The requested operation is not available in the given mode."""


class DivergenceError(QFockError, ArithmeticError):
    """A truncated series failed its convergence monitor."""


class TruncationError(QFockError, ArithmeticError):
    """A finite-section construction violated its positivity contract."""


class GridMismatchError(QFockError, ValueError):
    """Two grid functions do not live on the same q-grid."""

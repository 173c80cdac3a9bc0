"""Exception types shared across the package."""


class GreenpropError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(GreenpropError):
    """Invalid or inconsistent configuration input."""


class ShapeError(GreenpropError):
    """Field dimensions do not match the lattice."""


class UnsupportedOrderError(GreenpropError):
    """Derivative order outside the supported range."""


class DomainError(GreenpropError):
    """Argument outside the mathematical domain (e.g. negative time)."""


class VacuumError(GreenpropError):
    """Total density 1 + rho dropped to (or below) the vacuum floor."""


class NumericalError(GreenpropError):
    """Non-finite values or a numerical procedure that failed to converge."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


class DegenerateInputError(GreenpropError):
    """Input is identically zero where a ratio or fit is requested."""

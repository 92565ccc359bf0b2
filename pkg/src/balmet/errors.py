"""Exception types shared across the package."""


class BalmetError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(BalmetError):
    """Unsupported identifier, out-of-range parameter, or malformed config."""


class NumericalDomainError(BalmetError):
    """A field value left the numerical domain (non-finite, non-positive log argument)."""


class ConditioningError(BalmetError):
    """A matrix that must be positive definite failed its conditioning guard."""


class DegenerateDensityError(BalmetError):
    """The section density matrix became singular at a quadrature node."""


class ConstructionError(BalmetError):
    """A derived object failed its internal consistency check while being built."""

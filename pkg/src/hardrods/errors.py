"""Exception hierarchy shared by all hardrods modules."""


class HardRodsError(Exception):
    """Base class for every error raised by the package."""


class SchemaError(HardRodsError, ValueError):
    """A model description does not match the expected JSON schema."""


class DomainError(HardRodsError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class DivergentSeries(DomainError):
    """g(theta) (or a derivative) is infinite at the requested theta."""


class InfiniteAbscissa(DomainError):
    """The abscissa of convergence is +inf, so boundary values do not exist."""


class Unstable(DomainError):
    """No theta gives a finite g(theta)."""


class NotFluid(DomainError):
    """The quantity is only defined in the fluid regime."""


class OverPacked(DomainError):
    """Densities with sum_k l_k rho_k >= 1."""


class InvalidIndex(DomainError):
    """Empty or malformed multi-index."""


class CapExceeded(DomainError):
    """An enumeration would exceed its configured size cap."""


class ZeroLengthSpecies(DomainError):
    """A zero-length rod makes the continuous partition function infinite."""

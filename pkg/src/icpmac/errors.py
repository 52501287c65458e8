"""Exception types shared across the package."""


class IcpmacError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(IcpmacError, ValueError):
    """An input violates a constructor or operation contract."""


class BoundDomainError(ParameterError):
    """A closed-form bound was queried outside its mathematical domain."""

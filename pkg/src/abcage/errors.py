"""Exception types raised across the package."""


class CagingError(Exception):
    """Base class for all package errors."""


class NonUnitaryLink(CagingError, ValueError):
    pass


class DimensionMismatch(CagingError, ValueError):
    pass


class OutOfLattice(CagingError, IndexError):
    pass


class StepTooLarge(CagingError, ValueError):
    pass


class WindowTooSmall(CagingError, RuntimeError):
    pass


class IllConditioned(CagingError, ValueError):
    pass


class ConfigError(CagingError, ValueError):
    """Invalid run configuration. ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

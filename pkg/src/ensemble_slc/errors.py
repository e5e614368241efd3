"""Exception types raised across the package."""


class SLCError(Exception):
    """Base class for all package errors."""


class DimensionError(SLCError, ValueError):
    """Operands have incompatible shapes."""


class ConfigurationError(SLCError, ValueError):
    """A preset, model kind or configuration value is invalid."""


class ValidationError(SLCError, ValueError):
    """Input data (controls, members, files) failed validation."""


class NumericalFailure(SLCError, RuntimeError):
    """A non-finite value appeared during optimization.

    Attributes
    ----------
    iteration : int
        Learning iteration at which the failure was detected.
    """

    def __init__(self, message, iteration):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration

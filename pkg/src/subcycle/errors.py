"""Exception types shared across the package."""


class SubcycleError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(SubcycleError, ValueError):
    """Invalid user input or configuration."""


class ConvergenceError(SubcycleError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""

"""Exception hierarchy shared across the toolkit.

The CLI maps these onto its exit-code contract: DataError (and subclasses)
exit with 2, ConfigError with 3, anything else with 1.
"""


class MvsaError(Exception):
    """Base class for all toolkit errors."""


class DataError(MvsaError):
    """Malformed or inconsistent input data (shapes, non-finite values, files)."""


class DomainError(DataError):
    """An input value lies outside the support of its marginal distribution."""


class ConfigError(MvsaError):
    """Invalid configuration or precondition violation (flags, caps, kappa)."""

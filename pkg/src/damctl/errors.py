"""Exception types shared across the package."""


class DamctlError(Exception):
    """Base class for package-specific errors."""


class NumericDegeneracyError(DamctlError):
    """Raised when the busy-period recurrence cannot be evaluated in double
    precision (e.g. the zero-arrival weight r_0 underflows)."""


class RegimeError(DamctlError):
    """Raised when an asymptotic formula is evaluated outside its load regime."""

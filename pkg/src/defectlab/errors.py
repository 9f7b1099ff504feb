"""Exception types shared across the package."""


class CapacityError(ValueError):
    """An exhaustive computation would exceed its enumeration cap."""


class ConstructionError(ValueError):
    """A code family was given parameters that do not yield a valid code."""


class LocalityError(ValueError):
    """A coordinate is not covered by any codeword of the masking code."""


class MaskingError(RuntimeError):
    """No codeword compatible with the stuck cells exists for the request."""


class InvariantViolation(RuntimeError):
    """An internal consistency law failed; input data is corrupted."""

"""Error types and shared validation helpers."""


class ValidationError(ValueError):
    """Raised when a configuration value violates a documented constraint.

    Messages always name the offending field and the constraint, e.g.
    ``"config.model_width: must be divisible by heads"``.
    """


class DataError(ValueError):
    """Raised when a dataset file or record is missing, malformed, or empty."""


class StateError(RuntimeError):
    """Raised when an operation needs a trained model and none is available."""


def require(condition, field, constraint):
    """Raise :class:`ValidationError` naming `field` unless `condition` holds."""
    if not condition:
        raise ValidationError(f"{field}: {constraint}")


def is_int(value):
    """True for genuine ints only (bools are rejected)."""
    return isinstance(value, int) and not isinstance(value, bool)

"""Shared input-validation helpers."""

import numpy as np


class ValidationError(ValueError):
    """Raised when a user-supplied value violates a documented constraint.

    Messages always name the offending field and the constraint, e.g.
    ``"scan.m_steps: must be a positive integer"``.
    """


def require(condition, field, constraint):
    """Raise :class:`ValidationError` naming `field` unless `condition` holds."""
    if not condition:
        raise ValidationError(f"{field}: {constraint}")


def as_complex_matrix(x, name="matrix"):
    """Coerce `x` (array-like or an object with a `.values` array) to a 2-D complex ndarray."""
    values = getattr(x, "values", x)
    arr = np.asarray(values, dtype=complex)
    require(arr.ndim == 2, name, "must be a 2-D matrix")
    require(arr.size > 0, name, "must be nonempty")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValidationError(f"{name}: entries must be finite")
    return arr


def as_complex_vector(x, name="vector"):
    """Coerce `x` to a 1-D complex ndarray."""
    arr = np.asarray(x, dtype=complex)
    require(arr.ndim == 1, name, "must be a 1-D vector")
    return arr


def as_float_array(x, name="array"):
    """Coerce `x` to a float ndarray, requiring finite entries."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: entries must be finite")
    return arr

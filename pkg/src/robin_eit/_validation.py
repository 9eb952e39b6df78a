"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import DomainError


def check_square_operator(X, name="X"):
    """Return ``X`` as a finite, square, 2-D float array.

    ``OperatorMatrix`` instances are unwrapped through their ``entries``.
    """
    X = getattr(X, "entries", X)
    try:
        X = check_array(X, dtype=np.float64, ensure_all_finite=True, copy=False)
    except ValueError as exc:
        raise DomainError(f"{name}: {exc}") from exc
    if X.shape[0] != X.shape[1]:
        raise DomainError(f"{name} must be square, got shape {X.shape}")
    return X


def check_vector(b, n=None, name="b"):
    b = getattr(b, "values", b)
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise DomainError(f"{name} contains non-finite entries")
    if n is not None and b.shape[0] != n:
        raise DomainError(f"{name} has length {b.shape[0]}, expected {n}")
    return b


def check_sampling_points(Z, r_max=None):
    """Validate an ``(n_samples, 2)`` array of Cartesian sampling points."""
    try:
        Z = check_array(Z, dtype=np.float64, ensure_all_finite=True)
    except ValueError as exc:
        raise DomainError(f"sampling points: {exc}") from exc
    if Z.shape[1] != 2:
        raise DomainError(f"sampling points must have 2 columns, got {Z.shape[1]}")
    radii = np.hypot(Z[:, 0], Z[:, 1])
    if r_max is not None and np.any(radii > r_max + 1e-12):
        raise DomainError(f"sampling points must satisfy |z| <= {r_max}")
    if np.any(radii >= 1.0):
        raise DomainError("sampling points must lie strictly inside the unit disk")
    return Z


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise DomainError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise DomainError(f"{name} must be positive, got {value!r}")
    if not strict and value < 0:
        raise DomainError(f"{name} must be nonnegative, got {value!r}")
    return float(value)

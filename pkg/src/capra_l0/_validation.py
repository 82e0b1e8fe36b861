"""Input checks and tolerance predicates shared across the package."""

import numpy as np

DEFAULT_TOL = 1e-9


def check_vector(y, name="y"):
    """Return ``y`` as a finite 1-D float array with at least one entry."""
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def check_rows(Y, name="Y"):
    """Return ``Y`` as a finite float array whose last axis is the vector axis.

    Accepts a single vector or any stack of vectors, shape ``(..., d)``.
    """
    arr = np.asarray(Y, dtype=float)
    if arr.ndim == 0:
        raise ValueError(f"{name} must be at least 1-D")
    if arr.shape[-1] == 0:
        raise ValueError(f"{name} must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def check_tol(tol):
    tol = float(tol)
    if not tol >= 0.0 or not np.isfinite(tol):
        raise ValueError(f"tol must be a finite nonnegative number, got {tol}")
    return tol


def slack(rhs, tol):
    # |lhs - rhs| <= tol * max(1, |rhs|)
    return tol * np.maximum(1.0, np.abs(rhs))


def leq(lhs, rhs, tol):
    return lhs <= rhs + slack(rhs, tol)


def geq(lhs, rhs, tol):
    return lhs >= rhs - slack(rhs, tol)


def close(lhs, rhs, tol):
    return np.abs(lhs - rhs) <= slack(rhs, tol)

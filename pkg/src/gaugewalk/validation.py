"""Input checks shared by the estimators."""

import numbers

import numpy as np
from sklearn.utils.validation import check_array


def check_states(X, dim: int) -> np.ndarray:
    """Validate a batch of state vectors, one per row, as complex128 ``(n, dim)``.

    ``check_array`` refuses complex input, so finiteness and shape are checked
    on the real and imaginary parts.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2D array of states, got {X.ndim}D")
    if X.shape[0] == 0:
        raise ValueError("no states given")
    if X.shape[1] != dim:
        raise ValueError(f"X has {X.shape[1]} features, but the walk acts on {dim}")
    X = X.astype(np.complex128)
    if not np.isfinite(X.real).all() or not np.isfinite(X.imag).all():
        raise ValueError("states contain NaN or infinity")
    return X


def check_fluxes(X) -> np.ndarray:
    """Flux grid given as ``(n,)`` or ``(n, 1)``; returns a 1D float array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    X = check_array(X, ensure_2d=True, dtype=np.float64)
    if X.shape[1] != 1:
        raise ValueError(f"flux grid must have a single column, got {X.shape[1]}")
    return X[:, 0]


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)

import numpy as np

from .exceptions import InvalidInputError, UsageError


def as_matrix(M, name="M"):
    """Return ``M`` as a finite 2-D float64 array or raise InvalidInputError."""
    try:
        arr = np.asarray(M, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} is not numeric: {exc}") from exc
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or infinite entries")
    return arr


def check_threshold(tau, name="tau"):
    tau = float(tau)
    if not np.isfinite(tau) or tau < 0:
        raise UsageError(f"{name} must be a finite non-negative number, got {tau}")
    return tau


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise UsageError(f"{name} must be positive, got {value}")
    return value


def check_random_state(seed):
    """Turn a seed or Generator into a numpy Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)

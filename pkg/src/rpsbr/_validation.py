import numbers

import numpy as np
from sklearn.utils.validation import check_array


def check_strategies(X, atol=1e-9):
    """Validate a batch of mixed strategies, shape (n_samples, 3)."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 3:
        raise ValueError(f"strategies have 3 coordinates, got {X.shape[1]} columns")
    if np.any(X < -atol):
        raise ValueError("strategies must have nonnegative coordinates")
    sums = X.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > atol):
        bad = int(np.argmax(np.abs(sums - 1.0)))
        raise ValueError(f"row {bad} sums to {sums[bad]!r}, not 1")
    return X


def check_open_unit(value, name):
    if not isinstance(value, numbers.Real) or not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
    return float(value)


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return float(value)

"""Parameter checks shared by the circuit builders, estimators and CLI."""

import math

import numpy as np
from sklearn.utils import check_array

INPUT_COLUMNS = ("noise_plus", "noise_minus", "signal_plus", "signal_minus")


class ParameterError(ValueError):
    """A named parameter failed validation.

    ``field`` carries the offending parameter name so front ends can report
    it without parsing the message.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class UndefinedTransferError(ValueError):
    """Signal transfer requested for an input carrying no signal."""


def check_fraction(value, field):
    value = _check_real(value, field)
    if not 0.0 <= value <= 1.0:
        raise ParameterError(field, f"must lie in [0, 1], got {value!r}")
    return value


def check_gain(value, field):
    return _check_real(value, field)


def check_variance_pair(pair, field, min_product=1.0):
    """Validate a (plus, minus) pair of noise variances.

    Both entries must be strictly positive and their product must be at
    least ``min_product`` (the intrinsic uncertainty bound for noise).
    """
    try:
        plus, minus = pair
    except (TypeError, ValueError):
        raise ParameterError(field, f"expected a (plus, minus) pair, got {pair!r}") from None
    plus = _check_real(plus, field)
    minus = _check_real(minus, field)
    if plus <= 0 or minus <= 0:
        raise ParameterError(field, f"variances must be positive, got ({plus!r}, {minus!r})")
    if plus * minus < min_product * (1 - 1e-12):
        raise ParameterError(
            field, f"noise product {plus * minus!r} violates the uncertainty bound {min_product}"
        )
    return plus, minus


def check_signal_pair(pair, field):
    try:
        plus, minus = pair
    except (TypeError, ValueError):
        raise ParameterError(field, f"expected a (plus, minus) pair, got {pair!r}") from None
    plus = _check_real(plus, field)
    minus = _check_real(minus, field)
    if plus < 0 or minus < 0:
        raise ParameterError(field, f"signal powers must be >= 0, got ({plus!r}, {minus!r})")
    return plus, minus


def check_input_states(X):
    """Validate an array of input-state rows.

    Each row is ``(noise_plus, noise_minus, signal_plus, signal_minus)``.
    Returns a float64 array of shape (n_samples, 4).
    """
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != len(INPUT_COLUMNS):
        raise ValueError(
            f"expected {len(INPUT_COLUMNS)} columns {INPUT_COLUMNS}, got {X.shape[1]}"
        )
    noise = X[:, :2]
    if np.any(noise <= 0):
        raise ParameterError("X", "noise variances must be positive")
    if np.any(noise[:, 0] * noise[:, 1] < 1 - 1e-12):
        raise ParameterError("X", "input noise violates the uncertainty bound noise_plus * noise_minus >= 1")
    if np.any(X[:, 2:] < 0):
        raise ParameterError("X", "signal powers must be non-negative")
    return X


def _check_real(value, field):
    if isinstance(value, bool):
        raise ParameterError(field, f"expected a real number, got {value!r}")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(field, f"expected a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ParameterError(field, f"must be finite, got {value!r}")
    return value

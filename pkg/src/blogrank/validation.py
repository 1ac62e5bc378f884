"""Input validation helpers; all raise :class:`ConfigError` on bad values."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

__all__ = [
    "check_fraction",
    "check_positive",
    "check_nonnegative",
    "check_positive_int",
    "check_choice",
    "check_row_stochastic",
]


def check_fraction(name: str, value: float) -> float:
    if not (0.0 <= value <= 1.0):
        raise ConfigError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)


def check_positive(name: str, value: float) -> float:
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_nonnegative(name: str, value: float) -> float:
    if not value >= 0:
        raise ConfigError(f"{name} must be nonnegative, got {value!r}")
    return float(value)


def check_positive_int(name: str, value: int) -> int:
    if int(value) != value or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_choice(name: str, value, choices) -> object:
    if value not in choices:
        raise ConfigError(f"{name} must be one of {tuple(choices)}, got {value!r}")
    return value


def check_row_stochastic(matrix: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Verify every row of a square matrix sums to 1 within ``tol``."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.size:
        sums = matrix.sum(axis=1)
        if not np.allclose(sums, 1.0, rtol=0.0, atol=tol):
            worst = float(np.abs(sums - 1.0).max())
            raise ConfigError(f"matrix rows must sum to 1 (worst deviation {worst:g})")
    return matrix

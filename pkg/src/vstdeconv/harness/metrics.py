"""Restoration error metrics."""

import numpy as np

from ..core import DimensionError

__all__ = ["mean_l1_error", "mse"]


def _pair(x_hat, x_true):
    x_hat = np.asarray(x_hat, dtype=np.float64)
    x_true = np.asarray(x_true, dtype=np.float64)
    if x_hat.shape != x_true.shape:
        raise DimensionError(f"shape mismatch: {x_hat.shape} vs {x_true.shape}")
    return x_hat, x_true


def mean_l1_error(x_hat, x_true):
    """Per-pixel mean absolute deviation."""
    x_hat, x_true = _pair(x_hat, x_true)
    return float(np.mean(np.abs(x_hat - x_true)))


def mse(x_hat, x_true):
    """Per-pixel mean squared deviation."""
    x_hat, x_true = _pair(x_hat, x_true)
    return float(np.mean((x_hat - x_true) ** 2))

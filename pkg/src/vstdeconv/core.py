"""Shared value conventions, errors, norms and seeded random streams.

Images are 2-D ``float64`` numpy arrays in row-major (C) order, shape
``(height, width)``. Coefficient vectors are 1-D ``float64`` arrays whose
layout is owned by the dictionary that produced them.
"""

import numpy as np

__all__ = [
    "DimensionError",
    "DomainError",
    "ConfigurationError",
    "NumericalError",
    "ConvergenceWarning",
    "as_image",
    "as_coeffs",
    "l2_norm",
    "linf_norm",
    "axpy",
    "make_rng",
]


class DimensionError(ValueError):
    """Array shapes or lengths are incompatible."""


class DomainError(ValueError):
    """Input lies outside the domain of the operation (e.g. negative counts)."""


class ConfigurationError(ValueError):
    """A parameter or configuration value is invalid."""


class NumericalError(ArithmeticError):
    """A numerical sub-procedure failed (e.g. a root could not be bracketed)."""


class ConvergenceWarning(UserWarning):
    """An iterative procedure stopped on its budget before meeting tolerance."""


def as_image(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D image, got shape {x.shape}")
    return x


def as_coeffs(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise DimensionError(f"expected a 1-D coefficient vector, got shape {a.shape}")
    return a


def l2_norm(v):
    """Euclidean norm of the flattened data.

    Falls back to a rescaled sum when the plain sum of squares under- or
    overflows.
    """
    v = np.ravel(v)
    s = float(np.linalg.norm(v))
    if (s == 0.0 or not np.isfinite(s)) and v.size:
        m = float(np.max(np.abs(v)))
        if m == 0.0 or not np.isfinite(m):
            return m
        s = m * float(np.linalg.norm(v / m))
    return s


def linf_norm(v):
    """Maximum absolute entry (0 for an empty array)."""
    v = np.ravel(v)
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v)))


def axpy(a, x, y):
    """Return ``a * x + y`` without modifying the inputs."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionError(f"axpy shape mismatch: {x.shape} vs {y.shape}")
    return a * x + y


def make_rng(seed, *keys):
    """Counter-based (Philox) generator keyed on ``seed`` and optional sub-keys.

    Sub-keys give independent streams per cell of a sweep, so the values a
    cell sees do not depend on how many other cells ran before it.
    """
    if seed < 0 or seed >= 2**64:
        raise ConfigurationError("seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence([int(seed), *[int(k) for k in keys]])
    return np.random.Generator(np.random.Philox(ss))

"""Anscombe variance stabilization and the stabilized data-fidelity term.

The fidelity of coefficients ``alpha`` is ``f1(alpha) = F(H Phi alpha)`` with

    F(eta) = sum_i 1/2 (z_i - 2 sqrt(eta_i + 3/8))^2

where ``z`` is the Anscombe transform of the observed counts. ``F`` is only
defined for ``eta > -3/8``; below zero it is continued by its tangent line at
``eta = 0``, so the gradient is held at its value at zero. The continuation
is convex and C^1 and keeps the curvature bound at ``eta = 0``.
"""

import numpy as np

from .core import DimensionError, DomainError, as_image, linf_norm

__all__ = [
    "anscombe",
    "anscombe_inverse",
    "FidelityTerm",
    "fidelity_value",
    "fidelity_gradient",
    "lipschitz_bound",
]

_OFFSET = 3.0 / 8.0
_KAPPA_FACTOR = (2.0 / 3.0) ** 1.5 * 4.0


def anscombe(y):
    """``2 sqrt(y + 3/8)`` elementwise; counts must be nonnegative."""
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0) or np.any(np.isnan(y)):
        raise DomainError("Anscombe transform requires nonnegative counts")
    return 2.0 * np.sqrt(y + _OFFSET)


def anscombe_inverse(z):
    """Algebraic inverse ``(z/2)^2 - 3/8`` clipped at zero."""
    z = np.asarray(z, dtype=np.float64)
    return np.maximum((z / 2.0) ** 2 - _OFFSET, 0.0)


def _pointwise(z, eta):
    """Value terms and derivative of ``f`` at ``eta`` (tangent continuation below 0)."""
    eta_c = np.maximum(eta, 0.0)
    root = np.sqrt(eta_c + _OFFSET)
    deriv = 2.0 - z / root
    value = 0.5 * (z - 2.0 * root) ** 2
    below = eta < 0
    if np.any(below):
        value = value + np.where(below, deriv * (eta - eta_c), 0.0)
    return value, deriv


class FidelityTerm:
    """Stabilized data fidelity ``F o H o Phi`` for fixed observations.

    Parameters
    ----------
    z : ndarray
        Stabilized observations (``anscombe(y)``), nonnegative.
    H : ConvOperator
    D : Dictionary
    """

    def __init__(self, z, H, D):
        z = as_image(z).copy()
        if np.any(z < 0):
            raise DomainError("stabilized observations must be nonnegative")
        if z.shape != H.shape or z.shape != D.shape:
            raise DimensionError("z, H and D must share one image shape")
        self.z = z
        self.z.flags.writeable = False
        self.H = H
        self.D = D
        self.z_inf = linf_norm(z)
        self.kappa = _KAPPA_FACTOR * D.A * H.norm2**2 * self.z_inf

    @classmethod
    def from_counts(cls, y, H, D):
        return cls(anscombe(y), H, D)

    def blurred(self, alpha):
        """``eta = H Phi alpha``."""
        return self.H.apply(self.D.synthesize(alpha))

    def value(self, alpha):
        vals, _ = _pointwise(self.z, self.blurred(alpha))
        return float(vals.sum())

    def gradient(self, alpha):
        _, deriv = _pointwise(self.z, self.blurred(alpha))
        return self.D.analyze(self.H.apply_adjoint(deriv))

    def value_and_gradient(self, alpha):
        vals, deriv = _pointwise(self.z, self.blurred(alpha))
        return float(vals.sum()), self.D.analyze(self.H.apply_adjoint(deriv))

    def lipschitz_bound(self):
        assert self.kappa > 0, "Lipschitz bound needs nonzero observations"
        return self.kappa


def fidelity_value(F, alpha):
    return F.value(alpha)


def fidelity_gradient(F, alpha):
    return F.gradient(alpha)


def lipschitz_bound(F):
    return F.lipschitz_bound()

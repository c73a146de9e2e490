"""Proximity operators for the sparsity penalty and the positivity constraint.

The non-smooth term is ``f2(alpha) = i_C(Phi alpha) + delta * sum_i w_i psi(alpha_i)``.
Its prox has no closed form for a general tight frame; :func:`prox_f2`
computes it by a Douglas-Rachford iteration between the separable part
``delta Psi + 1/2 ||. - alpha||^2`` and the indicator of
``C' = {alpha : Phi alpha >= 0}``, whose projector is available in closed form
for tight frames.
"""

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._backend import kernels
from .core import ConfigurationError, ConvergenceWarning, DimensionError, NumericalError, l2_norm

__all__ = [
    "Penalty",
    "ABS",
    "InnerLoopConfig",
    "ProxInfo",
    "scalar_prox",
    "prox_weighted_penalty",
    "project_positive",
    "project_C_prime",
    "reflect",
    "prox_f2",
]

_FEAS_TOL = 1e-12


@dataclass(frozen=True)
class Penalty:
    """Sparsity penalty ``psi`` applied coordinatewise.

    ``kind='abs'`` is ``|a|`` (soft-thresholding). For ``kind='generic'``
    supply ``psi``, its derivative ``dpsi`` on ``(0, inf)`` and the right
    derivative at zero ``dpsi0 > 0``; ``psi`` must be convex, even,
    nondecreasing on ``[0, inf)`` with ``psi(0) = 0``. Callables must accept
    numpy arrays.
    """

    kind: str = "abs"
    psi: Optional[Callable] = None
    dpsi: Optional[Callable] = None
    dpsi0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("abs", "generic"):
            raise ConfigurationError(f"unknown penalty kind {self.kind!r}")
        if self.kind == "generic":
            if self.psi is None or self.dpsi is None:
                raise ConfigurationError("generic penalty needs psi and dpsi")
            if not self.dpsi0 > 0:
                raise ConfigurationError("psi must have a positive right derivative at 0")

    def __call__(self, a):
        a = np.asarray(a, dtype=np.float64)
        if self.kind == "abs":
            return np.abs(a)
        return self.psi(np.abs(a))

    def total(self, alpha, weights=None):
        vals = self(alpha)
        if weights is not None:
            vals = vals * weights
        return float(np.sum(vals))


ABS = Penalty()


@dataclass
class InnerLoopConfig:
    """Controls of the inner Douglas-Rachford loop.

    ``nu`` is the (constant) relaxation in ``(0, 1)``; the loop stops when
    ``||gamma_{t+1} - gamma_t|| <= tol * (1 + ||gamma_t||)`` or after
    ``max_inner_iters`` iterations.
    """

    nu: float = 0.5
    max_inner_iters: int = 50
    tol: float = 1e-8
    warm_start: bool = False

    def __post_init__(self):
        if not 0.0 < self.nu < 1.0:
            raise ConfigurationError("nu must lie in (0, 1)")
        if self.max_inner_iters < 1:
            raise ConfigurationError("max_inner_iters must be >= 1")
        if self.tol < 0:
            raise ConfigurationError("tol must be nonnegative")


@dataclass
class ProxInfo:
    iterations: int
    converged: bool
    fast_path: bool
    gamma: Optional[np.ndarray] = None


def _generic_shrink(mag, thr, psi):
    """Solve ``a + thr * psi'(a) = mag`` on ``(0, mag]`` by vectorized bisection."""
    lo = np.zeros_like(mag)
    hi = mag.copy()
    with np.errstate(invalid="raise", over="raise"):
        try:
            top = hi + thr * psi.dpsi(hi)
        except FloatingPointError as exc:
            raise NumericalError("penalty derivative is not finite") from exc
    if np.any(~np.isfinite(top)) or np.any(top < mag):
        raise NumericalError("could not bracket the prox root; is psi nondecreasing?")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = mid + thr * psi.dpsi(mid) - mag
        up = g > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        if np.all(hi - lo <= 4e-16 * np.maximum(mag, 1e-300)):
            break
    return 0.5 * (lo + hi)


def prox_weighted_penalty(alpha, delta, psi=ABS, weights=None, out=None):
    """Coordinatewise prox of ``delta * sum_i w_i psi(alpha_i)``.

    ``weights`` (default all ones) may contain zeros, which leave those
    coordinates untouched.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if delta < 0:
        raise ConfigurationError("delta must be nonnegative")
    thr = np.full(alpha.shape, float(delta)) if weights is None else delta * np.asarray(weights, dtype=np.float64)
    if psi.kind == "abs":
        if out is None:
            out = np.empty_like(alpha)
        kernels.soft_threshold(alpha.ravel(), thr.ravel(), out.reshape(-1))
        return out
    mag = np.abs(alpha)
    active = mag > thr * psi.dpsi0
    res = np.zeros_like(alpha)
    if np.any(active):
        res[active] = np.sign(alpha[active]) * _generic_shrink(mag[active], thr[active], psi)
    if out is not None:
        out[...] = res
        return out
    return res


def scalar_prox(beta, delta, psi=ABS):
    """Prox of ``delta * psi`` at a scalar ``beta``.

    Zero when ``|beta| <= delta * psi'_+(0)``, otherwise the root of
    ``a = beta - delta * psi'(a)`` with the sign of ``beta``.
    """
    if not delta > 0:
        raise ConfigurationError("delta must be positive")
    return float(prox_weighted_penalty(np.array([float(beta)]), delta, psi)[0])


def project_positive(eta):
    """Projection onto the nonnegative orthant."""
    return np.maximum(eta, 0.0)


def project_C_prime(alpha, D):
    """Projection onto ``{alpha : Phi alpha >= 0}`` for a tight frame ``Phi``."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (D.L,):
        raise DimensionError(f"coefficient length {alpha.shape} != L = {D.L}")
    x = D.synthesize(alpha)
    neg = np.minimum(x, 0.0)
    if not np.any(neg):
        return alpha.copy()
    return alpha - D.analyze(neg) / D.A


def reflect(prox_output, x):
    """Reflection ``2 prox(x) - x``."""
    prox_output = np.asarray(prox_output, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if prox_output.shape != x.shape:
        raise DimensionError("reflect needs arrays of one shape")
    return 2.0 * prox_output - x


def prox_f2(
    alpha,
    mu_lambda,
    psi=ABS,
    D=None,
    cfg=None,
    weights=None,
    gamma0=None,
    force_inner=False,
    full_output=False,
    warn=True,
):
    """Prox of ``i_{C'} + mu_lambda * Psi`` at ``alpha``.

    When ``Phi alpha`` is feasible and the plain penalty prox stays feasible
    the latter is returned directly. Otherwise the Douglas-Rachford loop

        gamma <- gamma + nu * (R_1 R_{C'} gamma - gamma)

    runs, where ``R`` are reflections, ``prox_1(v)`` is the penalty prox with
    threshold ``mu_lambda / 2`` at ``(alpha + v) / 2``, and the answer is
    ``P_{C'}(gamma)``.

    Parameters
    ----------
    gamma0 : ndarray, optional
        Starting point of the inner loop (default ``alpha``).
    force_inner : bool
        Skip the feasible shortcut.
    full_output : bool
        Also return a :class:`ProxInfo`.
    warn : bool
        Emit :class:`ConvergenceWarning` when the budget runs out.
    """
    if D is None:
        raise ConfigurationError("prox_f2 needs a dictionary")
    if not mu_lambda > 0:
        raise ConfigurationError("mu_lambda must be positive")
    cfg = cfg or InnerLoopConfig()
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (D.L,):
        raise DimensionError(f"coefficient length {alpha.shape} != L = {D.L}")

    if not force_inner and D.synthesize(alpha).min() >= -_FEAS_TOL:
        p = prox_weighted_penalty(alpha, mu_lambda, psi, weights)
        if D.kind == "identity" or D.synthesize(p).min() >= -_FEAS_TOL:
            return (p, ProxInfo(0, True, True)) if full_output else p

    half = 0.5 * mu_lambda
    nu = cfg.nu
    gamma = alpha.copy() if gamma0 is None else np.array(gamma0, dtype=np.float64)
    converged = False
    it = 0
    q = np.empty_like(alpha)
    for it in range(1, cfg.max_inner_iters + 1):
        r2 = 2.0 * project_C_prime(gamma, D) - gamma
        prox_weighted_penalty(0.5 * (alpha + r2), half, psi, weights, out=q)
        step = nu * (2.0 * q - r2 - gamma)
        gamma += step
        if l2_norm(step) <= cfg.tol * (1.0 + l2_norm(gamma - step)):
            converged = True
            break
    if not converged and warn:
        warnings.warn(
            f"inner prox loop stopped after {it} iterations without reaching tol={cfg.tol:g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    p = project_C_prime(gamma, D)
    if full_output:
        return p, ProxInfo(it, converged, False, gamma)
    return p

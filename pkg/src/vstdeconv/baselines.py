"""Competitor deconvolvers: Richardson-Lucy, NaiveGauss and AnsGauss.

The two Gaussian-model methods reuse the forward-backward machinery of
:mod:`vstdeconv.solver` with a quadratic data term, so all methods share the
trace schema of the main solver.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, DimensionError, as_image, l2_norm
from .fidelity import anscombe, anscombe_inverse
from .prox import ABS, InnerLoopConfig, Penalty, project_positive
from .solver import SolverTrace, _check_counts, forward_backward, penalty_weights

__all__ = [
    "BaselineConfig",
    "QuadraticFidelity",
    "richardson_lucy",
    "naive_gauss",
    "ans_gauss",
]

_RL_FLOOR = 1e-12


@dataclass
class BaselineConfig:
    """Settings shared by the baselines.

    ``rl_stop_on_oracle_mse`` makes Richardson-Lucy return its iterate of
    smallest MSE against a supplied ground truth (simulation only).
    """

    max_iters: int = 200
    rl_stop_on_oracle_mse: bool = True
    lam: float = 1.0
    step_fraction: float = 0.9
    inner: InnerLoopConfig = field(default_factory=lambda: InnerLoopConfig(warm_start=True))
    threshold_coarse_scale: bool = False
    psi: Penalty = ABS
    fixed_point_tol: float = 1e-7

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigurationError("lambda must be nonnegative")
        if not 0.0 < self.step_fraction < 1.0:
            raise ConfigurationError("step_fraction must lie in (0, 1)")
        if self.max_iters < 0:
            raise ConfigurationError("max_iters must be >= 0")


class QuadraticFidelity:
    """``1/2 ||b - H Phi alpha||^2`` with gradient ``Phi^T H* (H Phi alpha - b)``."""

    def __init__(self, b, H, D):
        b = as_image(b)
        if b.shape != H.shape or b.shape != D.shape:
            raise DimensionError("data, H and D must share one image shape")
        self.b = b
        self.H = H
        self.D = D
        self.lipschitz = D.A * H.norm2**2

    def value(self, alpha):
        r = self.H.apply(self.D.synthesize(alpha)) - self.b
        return 0.5 * float(np.vdot(r, r))

    def gradient(self, alpha):
        r = self.H.apply(self.D.synthesize(alpha)) - self.b
        return self.D.analyze(self.H.apply_adjoint(r))

    def value_and_gradient(self, alpha):
        r = self.H.apply(self.D.synthesize(alpha)) - self.b
        return 0.5 * float(np.vdot(r, r)), self.D.analyze(self.H.apply_adjoint(r))

    def step_size_max(self):
        return 2.0 / self.lipschitz


def _gauss_solve(b, H, D, cfg):
    F = QuadraticFidelity(b, H, D)
    mu = cfg.step_fraction * F.step_size_max()
    alpha0 = D.analyze(np.maximum(b, 0.0)) / D.A
    weights = penalty_weights(D, cfg.threshold_coarse_scale)
    alpha, trace = forward_backward(F.value_and_gradient, D, cfg.lam, mu, cfg, alpha0, weights)
    return alpha, trace


def naive_gauss(y, H, D, cfg=None):
    """Sparse positive deconvolution treating the counts as Gaussian data.

    Returns ``(x_hat, trace)``.
    """
    cfg = cfg or BaselineConfig()
    y = _check_counts(y)
    alpha, trace = _gauss_solve(y, H, D, cfg)
    x = D.synthesize(alpha)
    x_hat = project_positive(x)
    trace.projection_gap = l2_norm(x_hat - x)
    return x_hat, trace


def ans_gauss(y, H, D, cfg=None):
    """Stabilize with Anscombe, deconvolve linearly, invert the transform.

    Positivity is imposed on the stabilized image. Returns ``(x_hat, trace)``.
    """
    cfg = cfg or BaselineConfig()
    y = _check_counts(y)
    z = anscombe(y)
    alpha, trace = _gauss_solve(z, H, D, cfg)
    s = D.synthesize(alpha)
    s_pos = project_positive(s)
    trace.projection_gap = l2_norm(s_pos - s)
    return anscombe_inverse(s_pos), trace


def richardson_lucy(y, H, cfg=None, oracle_truth=None):
    """Multiplicative Richardson-Lucy iterations from a flat start at ``mean(y)``.

    ``x <- x * H*(y / max(H x, 1e-12))``. With ``oracle_truth`` and
    ``cfg.rl_stop_on_oracle_mse`` the iterate of smallest MSE is returned
    (its index is ``trace.extra['best_iter']``). Returns ``(x_hat, trace)``;
    the trace's ``f1`` column holds the Poisson deviance.
    """
    cfg = cfg or BaselineConfig()
    y = _check_counts(y)
    if y.shape != H.shape:
        raise DimensionError("y and H must share one image shape")
    if not H.is_nonnegative():
        raise ConfigurationError("Richardson-Lucy needs a nonnegative PSF")
    if oracle_truth is not None:
        oracle_truth = as_image(oracle_truth)
        if oracle_truth.shape != y.shape:
            raise DimensionError("oracle image shape mismatch")
    use_oracle = oracle_truth is not None and cfg.rl_stop_on_oracle_mse

    x = np.full(y.shape, max(float(y.mean()), _RL_FLOOR))
    trace = SolverTrace(step=1.0)
    t0 = time.perf_counter()

    def record(x_cur, hx, delta):
        dev = 2.0 * float(np.sum(np.where(y > 0, y * np.log(np.maximum(y, _RL_FLOOR) / hx), 0.0) - y + hx))
        nrm = l2_norm(x_cur)
        trace.append(dev, 0.0, 0.0, delta, delta / nrm if nrm > 0 else 0.0, 0, time.perf_counter() - t0)

    hx = np.maximum(H.apply(x), _RL_FLOOR)
    record(x, hx, np.nan)
    best = x.copy()
    best_mse = float(np.mean((x - oracle_truth) ** 2)) if use_oracle else np.inf
    best_iter = 0
    mse_hist = [best_mse] if use_oracle else []
    for t in range(1, cfg.max_iters + 1):
        new = x * np.maximum(H.apply_adjoint(y / hx), 0.0)
        delta = l2_norm(new - x)
        x = new
        hx = np.maximum(H.apply(x), _RL_FLOOR)
        record(x, hx, delta)
        if use_oracle:
            err = float(np.mean((x - oracle_truth) ** 2))
            mse_hist.append(err)
            if err < best_mse:
                best_mse, best, best_iter = err, x.copy(), t
    trace.extra["oracle_stopped"] = bool(use_oracle)
    if use_oracle:
        trace.extra["best_iter"] = best_iter
        trace.extra["mse"] = mse_hist
        return best, trace
    trace.extra["best_iter"] = cfg.max_iters
    return x, trace

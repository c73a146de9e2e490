"""Forward-backward splitting for sparse deconvolution of Poisson data.

Iterates ``alpha <- prox_{mu f2}(alpha - mu grad f1(alpha))`` with the
stabilized fidelity ``f1`` and ``f2 = i_{C'} + lambda Psi``.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, DimensionError, DomainError, as_image, l2_norm
from .fidelity import FidelityTerm, anscombe
from .prox import ABS, InnerLoopConfig, Penalty, project_C_prime, project_positive, prox_f2

__all__ = [
    "SolverConfig",
    "SolverTrace",
    "objective",
    "step_size_max",
    "penalty_weights",
    "forward_backward",
    "solve",
]

_INFEASIBLE_TOL = 1e-9
_MU_MAX_FACTOR = 1.5**1.5


@dataclass
class SolverConfig:
    """Parameters of the forward-backward solve.

    The step is ``step_fraction * mu_max`` with ``mu_max = 2 / kappa``.
    ``init`` is ``'data'`` (``Phi^T z / A``), ``'counts'`` (``Phi^T y / A``)
    or ``'zeros'``.
    """

    lam: float = 1.0
    step_fraction: float = 0.9
    max_iters: int = 200
    fixed_point_tol: float = 1e-7
    threshold_coarse_scale: bool = False
    inner: InnerLoopConfig = field(default_factory=lambda: InnerLoopConfig(warm_start=True))
    psi: Penalty = ABS
    init: str = "counts"

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigurationError("lambda must be nonnegative")
        if not 0.0 < self.step_fraction < 1.0:
            raise ConfigurationError("step_fraction must lie in (0, 1) so that mu < mu_max")
        if self.max_iters < 0:
            raise ConfigurationError("max_iters must be >= 0")
        if self.fixed_point_tol < 0:
            raise ConfigurationError("fixed_point_tol must be nonnegative")
        if self.init not in ("data", "counts", "zeros"):
            raise ConfigurationError(f"unknown init {self.init!r}")


@dataclass
class SolverTrace:
    """Per-iteration history; entry 0 describes the starting point.

    ``residual`` is ``||alpha_{t+1} - alpha_t|| / mu`` and ``rel_change`` is
    ``||alpha_{t+1} - alpha_t|| / ||alpha_{t+1}||`` (both NaN at entry 0).
    """

    step: float = float("nan")
    f1: list = field(default_factory=list)
    penalty: list = field(default_factory=list)
    violation: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    rel_change: list = field(default_factory=list)
    inner_iters: list = field(default_factory=list)
    seconds: list = field(default_factory=list)
    converged: bool = False
    inner_unconverged: int = 0
    projection_gap: float = 0.0
    extra: dict = field(default_factory=dict)

    COLUMNS = ("iter", "f1", "penalty", "objective", "violation", "residual", "rel_change", "inner_iters", "seconds")

    def __len__(self):
        return len(self.f1)

    @property
    def iterations(self):
        return max(len(self.f1) - 1, 0)

    @property
    def objective(self):
        vals = np.asarray(self.f1) + np.asarray(self.penalty)
        return np.where(np.asarray(self.violation) > _INFEASIBLE_TOL, np.inf, vals)

    def append(self, f1, penalty, violation, residual, rel_change, inner_iters, seconds):
        self.f1.append(float(f1))
        self.penalty.append(float(penalty))
        self.violation.append(float(violation))
        self.residual.append(float(residual))
        self.rel_change.append(float(rel_change))
        self.inner_iters.append(int(inner_iters))
        self.seconds.append(float(seconds))

    def rows(self):
        obj = self.objective
        for t in range(len(self)):
            yield (
                t,
                self.f1[t],
                self.penalty[t],
                obj[t],
                self.violation[t],
                self.residual[t],
                self.rel_change[t],
                self.inner_iters[t],
                self.seconds[t],
            )


def penalty_weights(D, threshold_coarse_scale):
    """Per-coefficient penalty weights: 0 on the coarse scale unless it is thresholded."""
    if threshold_coarse_scale:
        return None
    mask = D.coarse_mask
    if not mask.any():
        return None
    return np.where(mask, 0.0, 1.0)


def _violation(x):
    return l2_norm(np.minimum(x, 0.0))


def objective(alpha, F, lam, psi=ABS, D=None, weights=None):
    """``f1(alpha) + lam * Psi(alpha)``, or ``+inf`` if ``Phi alpha`` is infeasible.

    Returns ``(value, parts)`` where ``parts`` always holds the finite
    ``f1``, ``penalty`` and ``violation`` (``||min(Phi alpha, 0)||``).
    """
    D = D or F.D
    x = D.synthesize(alpha)
    f1 = F.value(alpha)
    pen = lam * psi.total(alpha, weights)
    feasible = bool(x.min() >= -_INFEASIBLE_TOL)
    parts = {"f1": f1, "penalty": pen, "violation": _violation(x), "feasible": feasible}
    return (f1 + pen if feasible else float("inf")), parts


def step_size_max(F):
    """Supremum of admissible steps, ``(3/2)^{3/2} / (2 A ||H||^2 ||z||_inf)``."""
    denom = 2.0 * F.D.A * F.H.norm2**2 * F.z_inf
    assert denom > 0, "step bound needs nonzero observations"
    return _MU_MAX_FACTOR / denom


def forward_backward(value_and_grad, D, lam, mu, cfg, alpha0, weights=None, callback=None):
    """Generic forward-backward loop shared by the solver and the Gaussian baselines.

    ``value_and_grad(alpha) -> (f1, grad)`` supplies the smooth term.
    Returns ``(alpha, trace)``.
    """
    psi = cfg.psi
    alpha = np.array(alpha0, dtype=np.float64)
    if alpha.shape != (D.L,):
        raise DimensionError(f"alpha0 length {alpha.shape} != L = {D.L}")
    trace = SolverTrace(step=mu)
    t0 = time.perf_counter()
    f1, grad = value_and_grad(alpha)
    trace.append(f1, lam * psi.total(alpha, weights), _violation(D.synthesize(alpha)), np.nan, np.nan, 0, 0.0)
    gamma = None
    prev_input = None
    for _ in range(cfg.max_iters):
        fwd = alpha - mu * grad
        if lam > 0:
            gamma0 = None
            if cfg.inner.warm_start and gamma is not None:
                gamma0 = gamma + (fwd - prev_input)
            new, info = prox_f2(
                fwd, mu * lam, psi, D, cfg.inner, weights=weights, gamma0=gamma0, full_output=True, warn=False
            )
            if info.gamma is not None:
                gamma = info.gamma
            prev_input = fwd
            inner_iters = info.iterations
            if not info.converged:
                trace.inner_unconverged += 1
        else:
            new = project_C_prime(fwd, D)
            inner_iters = 0
        delta = l2_norm(new - alpha)
        alpha = new
        f1, grad = value_and_grad(alpha)
        nrm = l2_norm(alpha)
        rel = delta / nrm if nrm > 0 else (0.0 if delta == 0 else np.inf)
        trace.append(
            f1,
            lam * psi.total(alpha, weights),
            _violation(D.synthesize(alpha)),
            delta / mu,
            rel,
            inner_iters,
            time.perf_counter() - t0,
        )
        if callback is not None:
            callback(alpha, trace)
        if rel <= cfg.fixed_point_tol:
            trace.converged = True
            break
    return alpha, trace


def _check_counts(y):
    y = as_image(y)
    if np.any(y < 0):
        raise DomainError("counts must be nonnegative")
    return y


def solve(y, H, D, cfg=None, alpha0=None):
    """Deconvolve Poisson counts ``y``.

    Returns ``(alpha_hat, x_hat, trace)`` where ``x_hat`` is the positive part
    of ``Phi alpha_hat``; the size of that final projection is stored in
    ``trace.projection_gap``.
    """
    cfg = cfg or SolverConfig()
    y = _check_counts(y)
    if y.shape != H.shape or y.shape != D.shape:
        raise DimensionError("y, H and D must share one image shape")
    F = FidelityTerm(anscombe(y), H, D)
    mu = cfg.step_fraction * step_size_max(F)
    if alpha0 is None:
        if cfg.init == "data":
            alpha0 = D.analyze(F.z) / D.A
        elif cfg.init == "counts":
            alpha0 = D.analyze(y) / D.A
        else:
            alpha0 = np.zeros(D.L)
    weights = penalty_weights(D, cfg.threshold_coarse_scale)
    alpha, trace = forward_backward(F.value_and_gradient, D, cfg.lam, mu, cfg, alpha0, weights)
    x = D.synthesize(alpha)
    x_hat = project_positive(x)
    trace.projection_gap = l2_norm(x_hat - x)
    trace.extra["kappa"] = F.kappa
    return alpha, x_hat, trace

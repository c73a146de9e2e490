"""Simulation sweeps over intensity regimes, seeds and lambda grids.

For every regime the phantom is scaled, blurred and Poisson-sampled once per
seed; every method then restores the same counts. The lambda of each
(method, regime) is the grid value with the smallest seed-averaged mean l1
error against the truth, i.e. an oracle choice valid in simulation only.
"""

import configparser
import csv
import logging
import os
import time
import warnings
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from ..baselines import BaselineConfig, ans_gauss, naive_gauss, richardson_lucy
from ..convolution import ConvOperator, center_kernel, make_gaussian_psf
from ..core import ConfigurationError, make_rng
from ..dictionary import make_dictionary
from ..prox import InnerLoopConfig
from ..solver import SolverConfig, solve
from .imageio import read_image, write_counts, write_float_image
from .metrics import mean_l1_error, mse
from .simulate import PHANTOMS, make_phantom, poisson_sample, scale_to_max

__all__ = [
    "METHODS",
    "DEFAULT_LAMBDA_GRIDS",
    "ExperimentSpec",
    "MetricsRow",
    "parse_psf",
    "load_phantom",
    "simulate_counts",
    "run_method",
    "run_benchmark",
    "write_metrics_csv",
]

log = logging.getLogger(__name__)

METHODS = ("ours", "naive-gauss", "ans-gauss", "rl")

DEFAULT_LAMBDA_GRIDS = {
    "ours": [0.1, 0.2, 0.4, 0.8, 1.6, 3.2],
    "naive-gauss": [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
    "ans-gauss": [0.1, 0.2, 0.4, 0.8, 1.6, 3.2],
}

CSV_COLUMNS = ("method", "regime", "lambda", "mean_l1", "mse", "iters", "seconds")


def parse_psf(text, shape):
    """Build a :class:`ConvOperator` from ``gaussian:SIGMA``, ``box:K`` or ``delta``."""
    kind, _, arg = text.strip().partition(":")
    kind = kind.lower()
    if kind == "gaussian":
        try:
            sigma = float(arg)
        except ValueError:
            raise ConfigurationError(f"bad PSF spec {text!r}") from None
        return ConvOperator(make_gaussian_psf(shape[1], shape[0], sigma, True))
    if kind == "box":
        k = int(arg)
        return ConvOperator(center_kernel(np.full((k, k), 1.0 / (k * k)), shape))
    if kind == "delta":
        return ConvOperator.identity(shape)
    raise ConfigurationError(f"unknown PSF kind {kind!r}")


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _bool(text):
    val = text.strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


@dataclass
class ExperimentSpec:
    """Description of one benchmark sweep.

    Read from a flat ``key = value`` file; list values are comma or space
    separated, per-method grids use keys ``lambda.<method>``.
    """

    phantom: str = "disks"
    size: int = 128
    max_intensity: list = field(default_factory=lambda: [5.0, 30.0, 100.0, 255.0])
    psf: str = "gaussian:1.0"
    seeds: list = field(default_factory=lambda: [1])
    methods: list = field(default_factory=lambda: list(METHODS))
    dictionary: str = "haar"
    levels: Optional[int] = None
    iters: int = 200
    rl_iters: int = 200
    step_fraction: float = 0.9
    threshold_coarse_scale: bool = False
    inner_iters: int = 50
    inner_tol: float = 1e-8
    warm_start: bool = True
    lambda_grids: dict = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_LAMBDA_GRIDS.items()})
    output: str = "bench_out"
    timing: bool = False
    write_images: bool = True

    def __post_init__(self):
        if not self.methods:
            raise ConfigurationError("method list must be non-empty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigurationError(f"unknown method {m!r}; choose from {METHODS}")
        if not self.max_intensity or min(self.max_intensity) <= 0:
            raise ConfigurationError("max_intensity values must be positive")
        if not self.seeds:
            raise ConfigurationError("at least one seed is required")
        for m in self.methods:
            if m != "rl" and not self.lambda_grids.get(m):
                raise ConfigurationError(f"empty lambda grid for {m!r}")

    @classmethod
    def from_mapping(cls, items):
        kwargs = {}
        grids = {k: list(v) for k, v in DEFAULT_LAMBDA_GRIDS.items()}
        names = {f.name for f in fields(cls)}
        for key, raw in items.items():
            key = key.strip().lower()
            raw = raw.strip()
            if key.startswith("lambda."):
                grids[key[len("lambda.") :]] = _floats(raw)
            elif key in ("max_intensity", "regimes"):
                kwargs["max_intensity"] = _floats(raw)
            elif key in ("seeds", "seed"):
                kwargs["seeds"] = [int(v) for v in _floats(raw)]
            elif key == "methods":
                kwargs["methods"] = [m for m in raw.replace(",", " ").split()]
            elif key in ("dictionary", "dict"):
                kwargs["dictionary"] = raw
            elif key in ("size", "iters", "rl_iters", "inner_iters"):
                kwargs[key] = int(raw)
            elif key == "levels":
                kwargs[key] = int(raw) if raw.lower() not in ("", "none", "auto") else None
            elif key in ("step_fraction", "inner_tol"):
                kwargs[key] = float(raw)
            elif key in ("threshold_coarse_scale", "warm_start", "timing", "write_images"):
                kwargs[key] = _bool(raw)
            elif key in ("phantom", "psf", "output"):
                kwargs[key] = raw
            elif key in names:
                raise ConfigurationError(f"key {key!r} cannot be set from a spec file")
            else:
                raise ConfigurationError(f"unknown spec key {key!r}")
        kwargs["lambda_grids"] = grids
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        parser.read_string("[spec]\n" + text)
        spec = cls.from_mapping(dict(parser["spec"]))
        if not os.path.isabs(spec.output):
            spec.output = os.path.join(os.path.dirname(os.path.abspath(path)), spec.output)
        return spec


@dataclass
class MetricsRow:
    method: str
    regime: float
    lam: Optional[float]
    mean_l1: float
    mse: float
    iters: float
    seconds: float

    def __post_init__(self):
        for name in ("mean_l1", "mse", "iters", "seconds"):
            val = getattr(self, name)
            if not np.isnan(val) and val < 0:
                raise ValueError(f"{name} must be nonnegative")


def load_phantom(name, size):
    """Builtin phantom by name, or an image file normalized to maximum 1."""
    if name in PHANTOMS:
        return make_phantom(name, size, size)
    img = read_image(name)
    img = img - img.min()
    return img / img.max()


def simulate_counts(truth, H, seed, *keys):
    """Blur ``truth`` and draw Poisson counts from the stream keyed on ``(seed, *keys)``."""
    blurred = np.maximum(H.apply(truth), 0.0)
    return blurred, poisson_sample(blurred, make_rng(seed, *keys))


def run_method(method, y, H, D, lam=None, iters=200, step_fraction=0.9, inner=None,
               threshold_coarse_scale=False, truth=None, rl_iters=200):
    """Run one restoration; returns ``(x_hat, iterations, trace)``."""
    inner = inner or InnerLoopConfig(warm_start=True)
    if method == "ours":
        cfg = SolverConfig(lam=lam, step_fraction=step_fraction, max_iters=iters, inner=inner,
                           threshold_coarse_scale=threshold_coarse_scale)
        _, x_hat, trace = solve(y, H, D, cfg)
        return x_hat, trace.iterations, trace
    bcfg = BaselineConfig(max_iters=iters, lam=0.0 if lam is None else lam, step_fraction=step_fraction,
                          inner=inner, threshold_coarse_scale=threshold_coarse_scale)
    if method == "naive-gauss":
        x_hat, trace = naive_gauss(y, H, D, bcfg)
        return x_hat, trace.iterations, trace
    if method == "ans-gauss":
        x_hat, trace = ans_gauss(y, H, D, bcfg)
        return x_hat, trace.iterations, trace
    if method == "rl":
        bcfg.max_iters = rl_iters
        x_hat, trace = richardson_lucy(y, H, bcfg, oracle_truth=truth)
        return x_hat, trace.extra["best_iter"], trace
    raise ConfigurationError(f"unknown method {method!r}")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if np.isnan(v):
            return "nan"
        return format(v, ".10g")
    return str(v)


def write_metrics_csv(path, rows, timing=False):
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([r.method, _fmt(float(r.regime)), _fmt(r.lam), _fmt(r.mean_l1), _fmt(r.mse),
                        _fmt(float(r.iters)), _fmt(float(r.seconds)) if timing else ""])


def _check_monotone(rows, methods):
    for m in methods:
        seq = sorted((r.regime, r.mean_l1) for r in rows if r.method == m and not np.isnan(r.mean_l1))
        errs = [e for _, e in seq]
        if any(b < a for a, b in zip(errs, errs[1:])):
            warnings.warn(f"mean l1 error of {m!r} is not nondecreasing in the intensity ceiling", RuntimeWarning)


def run_benchmark(spec, progress=None):
    """Run the sweep described by ``spec``; returns the list of :class:`MetricsRow`.

    Writes ``metrics.csv`` (one row per method and regime), ``runs.csv``
    (every seed and lambda), ``timing.csv`` and, if enabled, the truth, counts
    and selected restorations of the first seed per regime.
    """
    os.makedirs(spec.output, exist_ok=True)
    base = load_phantom(spec.phantom, spec.size)
    H = parse_psf(spec.psf, base.shape)
    D = make_dictionary(spec.dictionary, base.shape, spec.levels)
    inner = InnerLoopConfig(max_inner_iters=spec.inner_iters, tol=spec.inner_tol, warm_start=spec.warm_start)

    rows = []
    run_records = []
    timing_records = []
    for r_idx, regime in enumerate(spec.max_intensity):
        truth = scale_to_max(base, regime)
        data = [simulate_counts(truth, H, seed, r_idx) for seed in spec.seeds]
        if spec.write_images:
            write_float_image(os.path.join(spec.output, f"truth_I{regime:g}.f32"), truth)
            write_float_image(os.path.join(spec.output, f"blurred_I{regime:g}.f32"), data[0][0])
            write_counts(os.path.join(spec.output, f"counts_I{regime:g}"), data[0][1])
        for method in spec.methods:
            grid = [None] if method == "rl" else spec.lambda_grids[method]
            results = []
            for lam in grid:
                l1s, mses, its, secs = [], [], [], []
                first_img = None
                failed = None
                for s_idx, (_, y) in enumerate(data):
                    t0 = time.perf_counter()
                    try:
                        x_hat, n_it, _ = run_method(
                            method, y, H, D, lam, spec.iters, spec.step_fraction, inner,
                            spec.threshold_coarse_scale, truth, spec.rl_iters,
                        )
                    except Exception as exc:  # one failing cell must not abort the sweep
                        log.error("%s at regime %g, lambda %s failed: %s", method, regime, lam, exc)
                        failed = exc
                        break
                    dt = time.perf_counter() - t0
                    if s_idx == 0:
                        first_img = x_hat
                    l1s.append(mean_l1_error(x_hat, truth))
                    mses.append(mse(x_hat, truth))
                    its.append(n_it)
                    secs.append(dt)
                    run_records.append((method, regime, lam, spec.seeds[s_idx], l1s[-1], mses[-1], n_it))
                    timing_records.append((method, regime, lam, spec.seeds[s_idx], dt))
                if failed is not None:
                    results.append((lam, np.nan, np.nan, np.nan, np.nan, None))
                    continue
                results.append((lam, float(np.mean(l1s)), float(np.mean(mses)), float(np.mean(its)),
                                float(np.sum(secs)), first_img))
                if progress:
                    progress(f"{method:12s} I={regime:g} lambda={_fmt(lam) or '-':>8s} l1={np.mean(l1s):.4f}")
            valid = [r for r in results if not np.isnan(r[1])]
            if not valid:
                rows.append(MetricsRow(method, regime, None, np.nan, np.nan, np.nan, np.nan))
                continue
            best = min(valid, key=lambda r: r[1])
            rows.append(MetricsRow(method, regime, best[0], best[1], best[2], best[3],
                                   float(sum(r[4] for r in valid))))
            if spec.write_images and best[5] is not None:
                write_float_image(os.path.join(spec.output, f"{method}_I{regime:g}.f32"), best[5])

    write_metrics_csv(os.path.join(spec.output, "metrics.csv"), rows, spec.timing)
    with open(os.path.join(spec.output, "runs.csv"), "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("method", "regime", "lambda", "seed", "mean_l1", "mse", "iters"))
        for rec in run_records:
            w.writerow([rec[0], _fmt(float(rec[1])), _fmt(rec[2]), rec[3], _fmt(rec[4]), _fmt(rec[5]), rec[6]])
    with open(os.path.join(spec.output, "timing.csv"), "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("method", "regime", "lambda", "seed", "seconds"))
        for rec in timing_records:
            w.writerow([rec[0], _fmt(float(rec[1])), _fmt(rec[2]), rec[3], f"{rec[4]:.4f}"])
    _check_monotone(rows, spec.methods)
    return rows


def format_table(rows):
    """Table-1 style text: one line per method, one column per regime."""
    regimes = sorted({r.regime for r in rows})
    methods = list(dict.fromkeys(r.method for r in rows))
    lookup = {(r.method, r.regime): r.mean_l1 for r in rows}
    head = f"{'method':12s}" + "".join(f"{'<= ' + format(g, 'g'):>10s}" for g in regimes)
    lines = [head]
    for m in methods:
        lines.append(f"{m:12s}" + "".join(f"{lookup.get((m, g), np.nan):10.4f}" for g in regimes))
    return "\n".join(lines)

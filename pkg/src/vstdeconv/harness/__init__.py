"""Simulation, metrics, file formats, benchmark sweeps and the CLI."""

from .bench import ExperimentSpec, MetricsRow, run_benchmark
from .metrics import mean_l1_error, mse
from .simulate import make_phantom, poisson_sample, scale_to_max

__all__ = [
    "ExperimentSpec",
    "MetricsRow",
    "run_benchmark",
    "mean_l1_error",
    "mse",
    "make_phantom",
    "poisson_sample",
    "scale_to_max",
]

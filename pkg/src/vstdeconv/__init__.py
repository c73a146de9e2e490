"""Sparse deconvolution of Poisson images with the Anscombe transform.

Forward-backward splitting on wavelet coefficients, with baseline
deconvolvers and a simulation/benchmark harness.
"""

from ._backend import COMPILED
from .baselines import BaselineConfig, ans_gauss, naive_gauss, richardson_lucy
from .convolution import ConvOperator, make_gaussian_psf
from .core import (
    ConfigurationError,
    ConvergenceWarning,
    DimensionError,
    DomainError,
    NumericalError,
    l2_norm,
    linf_norm,
    make_rng,
)
from .dictionary import IdentityDictionary, OrthogonalWavelet, UndecimatedWavelet, make_dictionary
from .fidelity import FidelityTerm, anscombe, anscombe_inverse
from .prox import ABS, InnerLoopConfig, Penalty, prox_f2
from .solver import SolverConfig, SolverTrace, solve, step_size_max

__version__ = "0.1.0"

__all__ = [
    "COMPILED",
    "BaselineConfig",
    "ans_gauss",
    "naive_gauss",
    "richardson_lucy",
    "ConvOperator",
    "make_gaussian_psf",
    "ConfigurationError",
    "ConvergenceWarning",
    "DimensionError",
    "DomainError",
    "NumericalError",
    "l2_norm",
    "linf_norm",
    "make_rng",
    "IdentityDictionary",
    "OrthogonalWavelet",
    "UndecimatedWavelet",
    "make_dictionary",
    "FidelityTerm",
    "anscombe",
    "anscombe_inverse",
    "ABS",
    "InnerLoopConfig",
    "Penalty",
    "prox_f2",
    "SolverConfig",
    "SolverTrace",
    "solve",
    "step_size_max",
]

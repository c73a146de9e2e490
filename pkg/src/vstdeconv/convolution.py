"""Circular convolution operator built from a point spread function."""

import numpy as np

from .core import ConfigurationError, DimensionError, as_image

__all__ = [
    "ConvOperator",
    "make_gaussian_psf",
    "center_kernel",
    "apply",
    "apply_adjoint",
    "operator_norm",
]


def make_gaussian_psf(width, height, sigma, normalize_to_unit_sum=True):
    """Isotropic Gaussian sampled on a ``height x width`` grid, peak at (0, 0).

    Distances are circular, so the kernel wraps around the image borders and
    a vanishing ``sigma`` gives the discrete delta.
    """
    if not sigma > 0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    iy = np.arange(height)
    ix = np.arange(width)
    dy = np.minimum(iy, height - iy).astype(np.float64)
    dx = np.minimum(ix, width - ix).astype(np.float64)
    psf = np.exp(-(dy[:, None] ** 2 + dx[None, :] ** 2) / (2.0 * sigma**2))
    if normalize_to_unit_sum:
        psf /= psf.sum()
    return psf


def center_kernel(kernel, shape):
    """Embed a small kernel into an image grid with its center at (0, 0).

    The kernel center is ``(k_h // 2, k_w // 2)``; everything else wraps.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    kh, kw = kernel.shape
    if kh > shape[0] or kw > shape[1]:
        raise DimensionError("kernel larger than the image grid")
    psf = np.zeros(shape)
    psf[:kh, :kw] = kernel
    return np.roll(psf, (-(kh // 2), -(kw // 2)), axis=(0, 1))


class ConvOperator:
    """Circulant blur ``H`` with its spectrum, adjoint and spectral norm.

    Parameters
    ----------
    psf : array_like, shape (height, width)
        Kernel taps on the image grid with the kernel center at index (0, 0).
    """

    def __init__(self, psf):
        psf = as_image(psf).copy()
        if not np.all(np.isfinite(psf)):
            raise ConfigurationError("PSF has non-finite entries")
        self.psf = psf
        self.psf.flags.writeable = False
        self.shape = psf.shape
        self.psf_sum = float(psf.sum())
        self.spectrum = np.fft.fft2(psf)
        self._rspectrum = np.fft.rfft2(psf)
        self._rspectrum_conj = np.conj(self._rspectrum)
        self.norm2 = float(np.max(np.abs(self.spectrum)))

    @classmethod
    def gaussian(cls, shape, sigma):
        return cls(make_gaussian_psf(shape[1], shape[0], sigma, True))

    @classmethod
    def identity(cls, shape):
        psf = np.zeros(shape)
        psf[0, 0] = 1.0
        return cls(psf)

    def _check(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.shape:
            raise DimensionError(f"image shape {x.shape} does not match operator {self.shape}")
        return x

    def apply(self, x):
        x = self._check(x)
        return np.fft.irfft2(np.fft.rfft2(x) * self._rspectrum, s=self.shape)

    def apply_adjoint(self, x):
        x = self._check(x)
        return np.fft.irfft2(np.fft.rfft2(x) * self._rspectrum_conj, s=self.shape)

    def gram(self, x):
        """``H* H x`` in one round trip."""
        x = self._check(x)
        return np.fft.irfft2(np.fft.rfft2(x) * np.abs(self._rspectrum) ** 2, s=self.shape)

    def is_nonnegative(self):
        return bool(np.all(self.psf >= 0))

    def __repr__(self):
        return f"ConvOperator(shape={self.shape}, norm2={self.norm2:.6g})"


def apply(H, x):
    return H.apply(x)


def apply_adjoint(H, x):
    return H.apply_adjoint(x)


def operator_norm(H):
    return H.norm2

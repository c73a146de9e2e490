"""Sparsifying dictionaries: synthesis ``Phi alpha`` and analysis ``Phi^T x``.

Three kinds are provided, all tight frames with unit-norm atoms:

``identity``
    The canonical basis (``L = n``, ``A = 1``).
``orthogonal-wavelet``
    Periodized separable 2-D orthogonal wavelet basis (``L = n``, ``A = 1``).
``undecimated-wavelet``
    Translation-invariant wavelet frame: the union of the orthogonal wavelet
    basis over every circular shift in ``[0, 2**levels)**2``. Each member is
    an orthobasis, so ``Phi Phi^T = 4**levels * I`` with unit-norm atoms.

Coefficients are laid out subband-major. For one wavelet basis the order is
``cA_J, cH_J, cV_J, cD_J, cH_{J-1}, ..., cD_1``; the undecimated frame
concatenates one such block per shift. :attr:`Dictionary.subbands` publishes
the index map.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from ._backend import kernels
from .core import ConfigurationError, DimensionError, as_coeffs, as_image

__all__ = [
    "Subband",
    "Dictionary",
    "IdentityDictionary",
    "OrthogonalWavelet",
    "UndecimatedWavelet",
    "daubechies_filter",
    "make_dictionary",
    "analyze",
    "synthesize",
    "frame_constant",
]


def daubechies_filter(vanishing_moments):
    """Minimum-phase Daubechies scaling filter with ``2 * p`` taps, sum ``sqrt(2)``.

    Built by spectral factorization of the half-band polynomial, so the
    orthonormality relations hold to rounding error.
    """
    p = int(vanishing_moments)
    if p < 1:
        raise ConfigurationError("vanishing_moments must be >= 1")
    zeros = []
    if p > 1:
        poly = [comb(p - 1 + k, k) for k in range(p)]
        for y in np.roots(poly[::-1]):
            # sin^2(w/2) = y  <=>  z^2 - (2 - 4y) z + 1 = 0 with z = exp(-iw)
            pair = np.roots([1.0, -(2.0 - 4.0 * y), 1.0])
            zeros.append(pair[np.argmin(np.abs(pair))])
    q = np.real(np.poly(zeros)) if zeros else np.ones(1)
    h = np.ones(1)
    for _ in range(p):
        h = np.convolve(h, [1.0, 1.0])
    h = np.convolve(h, q)
    return h * (np.sqrt(2.0) / h.sum())


FILTER_FAMILIES = {"haar": 1, "db2": 2, "db4": 4}


def _qmf(h):
    k = np.arange(len(h))
    return ((-1.0) ** k) * h[::-1]


@dataclass(frozen=True)
class Subband:
    name: str
    level: int
    start: int
    shape: tuple
    shift: tuple = (0, 0)

    @property
    def stop(self):
        return self.start + self.shape[0] * self.shape[1]

    @property
    def slice(self):
        return slice(self.start, self.stop)

    @property
    def is_coarse(self):
        return self.name == "cA"


class Dictionary:
    """Common surface: ``analyze``, ``synthesize``, ``A``, ``L`` and the index map."""

    kind = None

    def __init__(self, shape):
        if len(shape) != 2 or shape[0] < 1 or shape[1] < 1:
            raise DimensionError(f"invalid image shape {shape}")
        self.shape = (int(shape[0]), int(shape[1]))
        self.n = self.shape[0] * self.shape[1]
        self.A = 1.0
        self.L = self.n
        self.levels = 0
        self.family = None
        self.subbands = []

    @property
    def coarse_mask(self):
        """Boolean mask over coefficients that belong to the coarsest (scaling) subband."""
        mask = np.zeros(self.L, dtype=bool)
        for sb in self.subbands:
            if sb.is_coarse:
                mask[sb.slice] = True
        return mask

    def _check_image(self, x):
        x = as_image(x)
        if x.shape != self.shape:
            raise DimensionError(f"image shape {x.shape} does not match dictionary {self.shape}")
        return x

    def _check_coeffs(self, alpha):
        alpha = as_coeffs(alpha)
        if alpha.shape[0] != self.L:
            raise DimensionError(f"coefficient length {alpha.shape[0]} != L = {self.L}")
        return alpha

    def analyze(self, x):
        raise NotImplementedError

    def synthesize(self, alpha):
        raise NotImplementedError

    def __repr__(self):
        return (
            f"{type(self).__name__}(shape={self.shape}, levels={self.levels}, "
            f"family={self.family!r}, L={self.L}, A={self.A:g})"
        )


class IdentityDictionary(Dictionary):
    kind = "identity"

    def __init__(self, shape):
        super().__init__(shape)
        self.subbands = [Subband("pixels", 0, 0, self.shape)]

    def analyze(self, x):
        return self._check_image(x).ravel().copy()

    def synthesize(self, alpha):
        return self._check_coeffs(alpha).reshape(self.shape).copy()


def _is_pow2(k):
    return k >= 1 and (k & (k - 1)) == 0


class OrthogonalWavelet(Dictionary):
    """Periodized separable orthogonal wavelet basis.

    Parameters
    ----------
    shape : (int, int)
        Image shape; both sides must be powers of two.
    levels : int
        Decomposition depth, at most ``log2(min(shape))``.
    family : {'haar', 'db2', 'db4'}
        Daubechies filter family (``db4`` has 8 taps).
    """

    kind = "orthogonal-wavelet"

    def __init__(self, shape, levels=3, family="haar"):
        super().__init__(shape)
        h_img, w_img = self.shape
        if not (_is_pow2(h_img) and _is_pow2(w_img)):
            raise DimensionError(f"wavelet dictionaries need power-of-two sides, got {self.shape}")
        if family not in FILTER_FAMILIES:
            raise ConfigurationError(f"unknown filter family {family!r}")
        levels = int(levels)
        max_levels = int(np.log2(min(h_img, w_img)))
        if levels < 1 or levels > max_levels:
            raise DimensionError(f"levels must be in [1, {max_levels}] for shape {self.shape}")
        self.levels = levels
        self.family = family
        self.lo = daubechies_filter(FILTER_FAMILIES[family])
        self.hi = _qmf(self.lo)
        self.subbands = self._layout(0, (0, 0))

    def _layout(self, offset, shift):
        J = self.levels
        h_img, w_img = self.shape
        bands = []
        shp = (h_img >> J, w_img >> J)
        bands.append(Subband("cA", J, offset, shp, shift))
        offset += shp[0] * shp[1]
        for j in range(J, 0, -1):
            shp = (h_img >> j, w_img >> j)
            for name in ("cH", "cV", "cD"):
                bands.append(Subband(name, j, offset, shp, shift))
                offset += shp[0] * shp[1]
        return bands

    def _analysis_level(self, a):
        # lh: low along width, high along height -> horizontal edges
        return kernels.analysis_2d(a, self.lo, self.hi)

    def _synthesis_level(self, ll, lh, hl, hh):
        return kernels.synthesis_2d(ll, lh, hl, hh, self.lo, self.hi)

    def _analyze_into(self, x, out, offset):
        J = self.levels
        a = x
        details = []
        for _ in range(J):
            a, lh, hl, hh = self._analysis_level(a)
            details.append((lh, hl, hh))
        pos = offset
        out[pos : pos + a.size] = a.ravel()
        pos += a.size
        for lh, hl, hh in reversed(details):
            for band in (lh, hl, hh):
                out[pos : pos + band.size] = band.ravel()
                pos += band.size

    def _synthesize_block(self, block):
        J = self.levels
        h_img, w_img = self.shape
        shp = (h_img >> J, w_img >> J)
        size = shp[0] * shp[1]
        a = block[:size].reshape(shp)
        pos = size
        for _ in range(J):
            bands = []
            for _b in range(3):
                bands.append(block[pos : pos + size].reshape(shp))
                pos += size
            a = self._synthesis_level(a, *bands)
            shp = a.shape
            size = shp[0] * shp[1]
        return a

    def analyze(self, x):
        x = self._check_image(x)
        out = np.empty(self.L)
        self._analyze_into(x, out, 0)
        return out

    def synthesize(self, alpha):
        alpha = self._check_coeffs(alpha)
        return self._synthesize_block(alpha)


class UndecimatedWavelet(OrthogonalWavelet):
    """Translation-invariant wavelet tight frame (cycle-spun orthogonal basis).

    Every atom is a circularly shifted orthogonal wavelet atom, so atoms keep
    unit norm and ``Phi Phi^T = A I`` with ``A = 4**levels``.
    """

    kind = "undecimated-wavelet"

    def __init__(self, shape, levels=2, family="haar"):
        super().__init__(shape, levels, family)
        step = 2**self.levels
        self.shifts = [(sy, sx) for sy in range(step) for sx in range(step)]
        self.A = float(len(self.shifts))
        self.L = self.n * len(self.shifts)
        self.subbands = []
        for s, shift in enumerate(self.shifts):
            self.subbands.extend(self._layout(s * self.n, shift))

    def analyze(self, x):
        x = self._check_image(x)
        out = np.empty(self.L)
        for s, (sy, sx) in enumerate(self.shifts):
            shifted = np.roll(x, (-sy, -sx), axis=(0, 1)) if (sy or sx) else x
            self._analyze_into(np.ascontiguousarray(shifted), out, s * self.n)
        return out

    def synthesize(self, alpha):
        alpha = self._check_coeffs(alpha)
        out = np.zeros(self.shape)
        for s, (sy, sx) in enumerate(self.shifts):
            img = self._synthesize_block(alpha[s * self.n : (s + 1) * self.n])
            out += np.roll(img, (sy, sx), axis=(0, 1)) if (sy or sx) else img
        return out


def make_dictionary(name, shape, levels=None):
    """Build a dictionary from a short name.

    ``identity``, ``haar``, ``db2``, ``db4`` (orthogonal bases) and
    ``uwt-haar``, ``uwt-db2``, ``uwt-db4`` (undecimated frames).
    """
    if name == "identity":
        return IdentityDictionary(shape)
    if name.startswith("uwt-"):
        return UndecimatedWavelet(shape, 2 if levels is None else levels, name[4:])
    if name in FILTER_FAMILIES:
        if levels is None:
            levels = min(4, int(np.log2(min(shape))))
        return OrthogonalWavelet(shape, levels, name)
    raise ConfigurationError(f"unknown dictionary {name!r}")


def analyze(D, x):
    return D.analyze(x)


def synthesize(D, alpha):
    return D.synthesize(alpha)


def frame_constant(D):
    return D.A

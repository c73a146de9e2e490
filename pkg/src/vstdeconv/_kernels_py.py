"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def _taps_index(n, taps):
    return (2 * np.arange(n // 2)[:, None] + np.arange(taps)[None, :]) % n


def _analysis_axis(x, lo, hi, axis):
    x = np.moveaxis(x, axis, -1)
    windows = x[..., _taps_index(x.shape[-1], len(lo))]
    return np.moveaxis(windows @ lo, -1, axis), np.moveaxis(windows @ hi, -1, axis)


def _synthesis_axis(a, d, lo, hi, axis):
    a = np.moveaxis(a, axis, -1)
    d = np.moveaxis(d, axis, -1)
    n = 2 * a.shape[-1]
    out = np.zeros(a.shape[:-1] + (n,))
    base = 2 * np.arange(n // 2)
    for k in range(len(lo)):
        # i -> (2i + k) mod n is injective for even n
        out[..., (base + k) % n] += lo[k] * a + hi[k] * d
    return np.moveaxis(out, -1, axis)


def analysis_2d(x, lo, hi):
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    t_lo, t_hi = _analysis_axis(np.asarray(x, dtype=np.float64), lo, hi, 0)
    ll, hl = _analysis_axis(t_lo, lo, hi, 1)
    lh, hh = _analysis_axis(t_hi, lo, hi, 1)
    return ll, lh, hl, hh


def synthesis_2d(ll, lh, hl, hh, lo, hi):
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    t_lo = _synthesis_axis(ll, hl, lo, hi, 1)
    t_hi = _synthesis_axis(lh, hh, lo, hi, 1)
    return _synthesis_axis(t_lo, t_hi, lo, hi, 0)


def soft_threshold(x, t, out):
    np.multiply(np.sign(x), np.maximum(np.abs(x) - t, 0.0), out=out)

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: one level of the periodized 2-D filter bank and soft-thresholding.

Signatures mirror ``_kernels_py``. For filters ``lo``/``hi`` of length K a
level computes, along each axis,

    low[i] = sum_k lo[k] x[(2i + k) mod N],  high[i] = sum_k hi[k] x[(2i + k) mod N]

and the synthesis is the exact adjoint (transpose) of that map.
"""

import numpy as np

cimport cython


cdef inline void _analysis_1d(const double* x, Py_ssize_t n, const double* lo, const double* hi,
                              Py_ssize_t taps, double* a_out, double* d_out) noexcept nogil:
    cdef Py_ssize_t half = n // 2, i, k, j, interior
    cdef double a, d, v
    interior = (n - taps) // 2 + 1 if n >= taps else 0
    for i in range(interior):
        a = 0.0
        d = 0.0
        j = 2 * i
        for k in range(taps):
            v = x[j + k]
            a += lo[k] * v
            d += hi[k] * v
        a_out[i] = a
        d_out[i] = d
    for i in range(interior, half):
        a = 0.0
        d = 0.0
        j = 2 * i
        for k in range(taps):
            v = x[(j + k) % n]
            a += lo[k] * v
            d += hi[k] * v
        a_out[i] = a
        d_out[i] = d


cdef inline void _synthesis_1d(const double* a_in, const double* d_in, Py_ssize_t n,
                               const double* lo, const double* hi, Py_ssize_t taps,
                               double* out) noexcept nogil:
    cdef Py_ssize_t half = n // 2, i, k, j, interior
    cdef double a, d
    for i in range(n):
        out[i] = 0.0
    interior = (n - taps) // 2 + 1 if n >= taps else 0
    for i in range(interior):
        a = a_in[i]
        d = d_in[i]
        j = 2 * i
        for k in range(taps):
            out[j + k] += lo[k] * a + hi[k] * d
    for i in range(interior, half):
        a = a_in[i]
        d = d_in[i]
        j = 2 * i
        for k in range(taps):
            out[(j + k) % n] += lo[k] * a + hi[k] * d


def analysis_2d(x, lo, hi):
    """One level: returns ``(ll, lh, hl, hh)``; first letter is the filter along axis 1."""
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] lov = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] hiv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0], n = xv.shape[1], taps = lov.shape[0]
    cdef Py_ssize_t hm = m // 2, hn = n // 2, i, k, r, c
    cdef double fl, fh, v
    t_lo_arr = np.zeros((hm, n))
    t_hi_arr = np.zeros((hm, n))
    cdef double[:, ::1] t_lo = t_lo_arr
    cdef double[:, ::1] t_hi = t_hi_arr
    ll = np.empty((hm, hn))
    lh = np.empty((hm, hn))
    hl = np.empty((hm, hn))
    hh = np.empty((hm, hn))
    cdef double[:, ::1] llv = ll, lhv = lh, hlv = hl, hhv = hh
    with nogil:
        # along axis 0, contiguous row updates
        for i in range(hm):
            for k in range(taps):
                r = (2 * i + k) % m
                fl = lov[k]
                fh = hiv[k]
                for c in range(n):
                    v = xv[r, c]
                    t_lo[i, c] += fl * v
                    t_hi[i, c] += fh * v
        # along axis 1
        for i in range(hm):
            _analysis_1d(&t_lo[i, 0], n, &lov[0], &hiv[0], taps, &llv[i, 0], &hlv[i, 0])
            _analysis_1d(&t_hi[i, 0], n, &lov[0], &hiv[0], taps, &lhv[i, 0], &hhv[i, 0])
    return ll, lh, hl, hh


def synthesis_2d(ll, lh, hl, hh, lo, hi):
    """Adjoint of :func:`analysis_2d`."""
    cdef const double[:, ::1] llv = np.ascontiguousarray(ll, dtype=np.float64)
    cdef const double[:, ::1] lhv = np.ascontiguousarray(lh, dtype=np.float64)
    cdef const double[:, ::1] hlv = np.ascontiguousarray(hl, dtype=np.float64)
    cdef const double[:, ::1] hhv = np.ascontiguousarray(hh, dtype=np.float64)
    cdef const double[::1] lov = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] hiv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t hm = llv.shape[0], hn = llv.shape[1], taps = lov.shape[0]
    cdef Py_ssize_t m = 2 * hm, n = 2 * hn, i, k, r, c
    cdef double fl, fh
    t_lo_arr = np.empty((hm, n))
    t_hi_arr = np.empty((hm, n))
    cdef double[:, ::1] t_lo = t_lo_arr
    cdef double[:, ::1] t_hi = t_hi_arr
    out = np.zeros((m, n))
    cdef double[:, ::1] ov = out
    with nogil:
        for i in range(hm):
            _synthesis_1d(&llv[i, 0], &hlv[i, 0], n, &lov[0], &hiv[0], taps, &t_lo[i, 0])
            _synthesis_1d(&lhv[i, 0], &hhv[i, 0], n, &lov[0], &hiv[0], taps, &t_hi[i, 0])
        for i in range(hm):
            for k in range(taps):
                r = (2 * i + k) % m
                fl = lov[k]
                fh = hiv[k]
                for c in range(n):
                    ov[r, c] += fl * t_lo[i, c] + fh * t_hi[i, c]
    return out


def soft_threshold(const double[:] x, const double[:] t, double[:] out):
    cdef Py_ssize_t n = x.shape[0], i
    cdef double v, thr
    with nogil:
        for i in range(n):
            v = x[i]
            thr = t[i]
            if v > thr:
                out[i] = v - thr
            elif v < -thr:
                out[i] = v + thr
            else:
                out[i] = 0.0

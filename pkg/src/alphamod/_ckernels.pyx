# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same signatures as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport exp, isinf, sqrt

cnp.import_array()

cdef double EXP_CLIP = 700.0


cdef inline double _step(double tau) nogil:
    cdef double e
    if tau <= 0.0:
        return 0.0
    if tau >= 1.0:
        return 1.0
    e = 1.0 / tau - 1.0 / (1.0 - tau)
    if e > EXP_CLIP:
        e = EXP_CLIP
    elif e < -EXP_CLIP:
        e = -EXP_CLIP
    return 1.0 / (1.0 + exp(e))


def smooth_step(tau):
    cdef const double[::1] flat = np.ascontiguousarray(tau, dtype=np.float64).ravel()
    out_arr = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _step(flat[i])
    return out_arr.reshape(np.shape(tau))


def interval_windows(xi, rise_c, rise_h, fall_c, fall_h):
    cdef const double[::1] x = np.ascontiguousarray(xi, dtype=np.float64)
    cdef const double[::1] rc = np.ascontiguousarray(rise_c, dtype=np.float64)
    cdef const double[::1] rh = np.ascontiguousarray(rise_h, dtype=np.float64)
    cdef const double[::1] fc = np.ascontiguousarray(fall_c, dtype=np.float64)
    cdef const double[::1] fh = np.ascontiguousarray(fall_h, dtype=np.float64)
    cdef Py_ssize_t nb = rc.shape[0], npts = x.shape[0], b, i
    out_arr = np.empty((nb, npts), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double lo, hi, rw, fw
    for b in prange(nb, nogil=True, schedule="static"):
        lo = rc[b] - rh[b]
        rw = 2.0 * rh[b]
        hi = fc[b] - fh[b]
        fw = 2.0 * fh[b]
        for i in range(npts):
            out[b, i] = _step((x[i] - lo) / rw) * (1.0 - _step((x[i] - hi) / fw))
    return out_arr


def gather_blocks(spectrum, double dxi, starts, lengths, rise_c, rise_h, fall_c, fall_h,
                  Py_ssize_t width, offsets):
    cdef const double complex[::1] spec = np.ascontiguousarray(spectrum, dtype=np.complex128)
    cdef const long long[::1] st = np.ascontiguousarray(starts, dtype=np.int64)
    cdef const long long[::1] ln = np.ascontiguousarray(lengths, dtype=np.int64)
    cdef const long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const double[::1] rc = np.ascontiguousarray(rise_c, dtype=np.float64)
    cdef const double[::1] rh = np.ascontiguousarray(rise_h, dtype=np.float64)
    cdef const double[::1] fc = np.ascontiguousarray(fall_c, dtype=np.float64)
    cdef const double[::1] fh = np.ascontiguousarray(fall_h, dtype=np.float64)
    cdef Py_ssize_t n = spec.shape[0], nb = st.shape[0], b, i
    out_arr = np.zeros((nb, width), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef long long m, src, dst
    cdef double xv, lo, hi, rw, fw, w
    for b in prange(nb, nogil=True, schedule="dynamic"):
        lo = rc[b] - rh[b]
        rw = 2.0 * rh[b]
        hi = fc[b] - fh[b]
        fw = 2.0 * fh[b]
        for i in range(ln[b]):
            m = st[b] + i
            xv = m * dxi
            w = _step((xv - lo) / rw) * (1.0 - _step((xv - hi) / fw))
            src = m % n
            if src < 0:
                src = src + n
            dst = (off[b] + i) % width
            if dst < 0:
                dst = dst + width
            out[b, dst] = spec[src] * w
    return out_arr


def row_power_sums(rows, exponents):
    cdef const double complex[:, ::1] z = np.ascontiguousarray(rows, dtype=np.complex128)
    cdef const double[::1] ex = np.ascontiguousarray(exponents, dtype=np.float64)
    cdef Py_ssize_t nb = z.shape[0], width = z.shape[1], ne = ex.shape[0], b, i, j
    out_arr = np.zeros((nb, ne), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    sq_arr = np.empty((nb, width), dtype=np.float64)
    cdef double[:, ::1] sq = sq_arr
    cdef double acc, top
    # squared modulus once; fractional powers of it go through numpy's vectorized power
    for b in prange(nb, nogil=True, schedule="static"):
        acc = 0.0
        top = 0.0
        for i in range(width):
            sq[b, i] = z[b, i].real * z[b, i].real + z[b, i].imag * z[b, i].imag
            acc = acc + sq[b, i]
            if sq[b, i] > top:
                top = sq[b, i]
        for j in range(ne):
            if isinf(ex[j]):
                out[b, j] = sqrt(top)
            elif ex[j] == 2.0:
                out[b, j] = acc
    for j in range(ne):
        if not isinf(ex[j]) and ex[j] != 2.0:
            out_arr[:, j] = np.power(sq_arr, 0.5 * ex[j]).sum(axis=1)
    return out_arr

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled orbit kernels.

Fiber maps arrive pre-tabulated (see multicurves.kernels.tabulate): an
optional quadratic core z**2 + C(theta) with C a circle or a linearly
interpolated table, then an optional affine or Möbius table. All complex
arithmetic is spelled out on (re, im) pairs.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, rint, fabs, cos, sin, isfinite, sqrt, INFINITY

cdef double TWO_PI = 6.283185307179586


cdef inline double wrap1(double t) noexcept nogil:
    t = t - floor(t)
    if t >= 1.0:
        t = 0.0
    return t


cdef inline Py_ssize_t locate(double t, Py_ssize_t K, double* frac) noexcept nogil:
    # t already wrapped into [0, 1)
    cdef double s = t * K
    cdef double i = floor(s)
    cdef double f = s - i
    if fabs(f - rint(f)) < 1e-9:
        i = rint(s)
        f = 0.0
    frac[0] = f
    cdef Py_ssize_t k = <Py_ssize_t>i
    k = k % K
    if k < 0:
        k += K
    return k


cdef inline void fiber(double t, double zr, double zi, int loop_mode,
                       double c0r, double c0i, double rad,
                       const double* ltab, Py_ssize_t KL, int post_mode, const double* ptab,
                       Py_ssize_t KP, double* outr, double* outi) noexcept nogil:
    cdef double wr = zr, wi = zi, cr, ci, f, g, dot
    cdef Py_ssize_t i, j
    cdef int q
    cdef const double* lo
    cdef const double* hi
    cdef double ar, ai, br, bi, er, ei, dr, di, nr, ni, qr, qi, den
    if loop_mode == 1:
        cr = c0r + rad * cos(TWO_PI * t)
        ci = c0i + rad * sin(TWO_PI * t)
        wr = zr * zr - zi * zi + cr
        wi = 2.0 * zr * zi + ci
    elif loop_mode == 2:
        i = locate(t, KL, &f)
        j = i + 1
        if j == KL:
            j = 0
        cr = ltab[2 * i] * (1.0 - f) + ltab[2 * j] * f
        ci = ltab[2 * i + 1] * (1.0 - f) + ltab[2 * j + 1] * f
        wr = zr * zr - zi * zi + cr
        wi = 2.0 * zr * zi + ci
    if post_mode == 0:
        outr[0] = wr
        outi[0] = wi
        return
    i = locate(t, KP, &f)
    j = i + 1
    if j == KP:
        j = 0
    lo = ptab + 8 * i
    hi = ptab + 8 * j
    if post_mode == 1:
        ar = lo[0] * (1.0 - f) + hi[0] * f
        ai = lo[1] * (1.0 - f) + hi[1] * f
        br = lo[2] * (1.0 - f) + hi[2] * f
        bi = lo[3] * (1.0 - f) + hi[3] * f
        outr[0] = ar * wr - ai * wi + br
        outi[0] = ar * wi + ai * wr + bi
        return
    # Möbius: neighbouring matrices are sign-aligned before mixing
    dot = 0.0
    for q in range(8):
        dot += lo[q] * hi[q]
    g = -1.0 if dot < 0 else 1.0
    ar = lo[0] * (1.0 - f) + g * hi[0] * f
    ai = lo[1] * (1.0 - f) + g * hi[1] * f
    br = lo[2] * (1.0 - f) + g * hi[2] * f
    bi = lo[3] * (1.0 - f) + g * hi[3] * f
    er = lo[4] * (1.0 - f) + g * hi[4] * f
    ei = lo[5] * (1.0 - f) + g * hi[5] * f
    dr = lo[6] * (1.0 - f) + g * hi[6] * f
    di = lo[7] * (1.0 - f) + g * hi[7] * f
    nr = ar * wr - ai * wi + br
    ni = ar * wi + ai * wr + bi
    qr = er * wr - ei * wi + dr
    qi = er * wi + ei * wr + di
    den = qr * qr + qi * qi
    if den == 0.0:
        outr[0] = INFINITY
        outi[0] = 0.0
        return
    outr[0] = (nr * qr + ni * qi) / den
    outi[0] = (ni * qr - nr * qi) / den


cdef inline double fiber_distance(double t, double zr, double zi,
                                  const double* curve, Py_ssize_t p, Py_ssize_t M, int n) noexcept nogil:
    cdef Py_ssize_t c, k, j
    cdef const double* g
    cdef double best = INFINITY, f, gr, gi, dx, dy, d2
    cdef int i
    for c in range(p):
        for i in range(n):
            k = locate((t + i) / n, M, &f)
            j = k + 1
            if j == M:
                j = 0
            g = curve + 2 * M * c
            gr = g[2 * k] * (1.0 - f) + g[2 * j] * f
            gi = g[2 * k + 1] * (1.0 - f) + g[2 * j + 1] * f
            dx = zr - gr
            dy = zi - gi
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
    return sqrt(best)


def run_orbits(const double[::1] theta, const double[::1] zr0, const double[::1] zi0,
               double alpha, int loop_mode, double c0r, double c0i, double rad,
               const double[:, ::1] ltab, int post_mode, const double[:, ::1] ptab,
               int max_iter, double escape_radius,
               const double[:, :, ::1] curve, int n, const double[::1] thresh,
               bint stop_on_failure):
    """Status per point: 0 budget exhausted, 1 escaped, 2 attracted; plus the step index."""
    cdef Py_ssize_t P = theta.shape[0], idx
    cdef cnp.ndarray[cnp.int8_t, ndim=1] status_arr = np.zeros(P, dtype=np.int8)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] steps_arr = np.full(P, max_iter, dtype=np.int32)
    cdef signed char[::1] status = status_arr
    cdef int[::1] steps = steps_arr
    cdef bint use_curve = curve.shape[0] > 0
    cdef bint failed = False
    cdef double t, zr, zi, wr, wi, R2 = escape_radius * escape_radius, th
    cdef int k
    cdef Py_ssize_t KL = ltab.shape[0], KP = ptab.shape[0], pc = curve.shape[0], M = curve.shape[1]
    cdef const double* lp = &ltab[0, 0]
    cdef const double* pp = &ptab[0, 0]
    cdef const double* cp = NULL
    if pc > 0:
        cp = &curve[0, 0, 0]
    with nogil:
        for idx in range(P):
            if failed:
                break
            t = wrap1(theta[idx])
            zr = zr0[idx]
            zi = zi0[idx]
            th = thresh[idx]
            for k in range(max_iter + 1):
                if use_curve and fiber_distance(t, zr, zi, cp, pc, M, n) < th:
                    status[idx] = 2
                    steps[idx] = k
                    break
                if not (isfinite(zr) and isfinite(zi)) or zr * zr + zi * zi > R2:
                    status[idx] = 1
                    steps[idx] = k
                    if stop_on_failure:
                        failed = True
                    break
                if k == max_iter:
                    break
                fiber(t, zr, zi, loop_mode, c0r, c0i, rad, lp, KL, post_mode, pp, KP, &wr, &wi)
                zr = wr
                zi = wi
                t = wrap1(t + alpha)
    return status_arr, steps_arr


def critical_escape(const double[::1] pr, const double[::1] pi_, int kind, int max_iter,
                    double escape_radius):
    """Escape step of the critical orbit per parameter (-1 if bounded).

    kind 0: z -> z**2 + c from 0; kind 1: z -> lam z + z**2 from -lam/2.
    """
    cdef Py_ssize_t P = pr.shape[0], idx
    cdef cnp.ndarray[cnp.int32_t, ndim=1] out_arr = np.full(P, -1, dtype=np.int32)
    cdef int[::1] out = out_arr
    cdef double zr, zi, ar, ai, R2, wr, wi, rr
    cdef int k
    with nogil:
        for idx in range(P):
            ar = pr[idx]
            ai = pi_[idx]
            if kind == 0:
                zr = 0.0
                zi = 0.0
                R2 = escape_radius * escape_radius
            else:
                zr = -0.5 * ar
                zi = -0.5 * ai
                rr = sqrt(ar * ar + ai * ai) + 2.0
                if rr < escape_radius:
                    rr = escape_radius
                R2 = rr * rr
            for k in range(max_iter + 1):
                if zr * zr + zi * zi > R2:
                    out[idx] = k
                    break
                if k == max_iter:
                    break
                if kind == 0:
                    wr = zr * zr - zi * zi + ar
                    wi = 2.0 * zr * zi + ai
                else:
                    wr = zr * zr - zi * zi + ar * zr - ai * zi
                    wi = 2.0 * zr * zi + ar * zi + ai * zr
                zr = wr
                zi = wi
    return out_arr

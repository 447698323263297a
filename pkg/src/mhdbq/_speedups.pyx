# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled fused loops for the pointwise hot kernels.

Same contracts as _kernels_np; arrays arrive as flattened contiguous views.
"""

import numpy as np

from libc.math cimport sqrt, M_PI


def combine_advection_flat(double[:, ::1] a, double[:, :, ::1] grad_v,
                           double[:, ::1] b, double[:, :, ::1] grad_w,
                           double[:, ::1] out):
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t i, p
    cdef double a0, a1, a2, b0, b1, b2
    for p in range(n):
        a0 = a[0, p]; a1 = a[1, p]; a2 = a[2, p]
        b0 = b[0, p]; b1 = b[1, p]; b2 = b[2, p]
        for i in range(3):
            out[i, p] = (-a0 * grad_v[0, i, p] - a1 * grad_v[1, i, p]
                         - a2 * grad_v[2, i, p]
                         + b0 * grad_w[0, i, p] + b1 * grad_w[1, i, p]
                         + b2 * grad_w[2, i, p])


def scalar_advection_flat(double[:, ::1] a, double[:, ::1] grad_t,
                          double[::1] out):
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t p
    for p in range(n):
        out[p] = -(a[0, p] * grad_t[0, p] + a[1, p] * grad_t[1, p]
                   + a[2, p] * grad_t[2, p])


def rotational_terms_flat(double[:, ::1] u, double[:, ::1] om,
                          double[:, ::1] b, double[:, ::1] jj,
                          double[::1] th, double[:, ::1] out):
    """Fused cross products and heat flux; returns max(|u| + |b|) for CFL.

    out rows: 0-2 = u x om - b x jj, 3-5 = u x b, 6-8 = u * th.
    """
    cdef Py_ssize_t n = th.shape[0]
    cdef Py_ssize_t p
    cdef double u0, u1, u2, o0, o1, o2, b0, b1, b2, j0, j1, j2, t, s
    cdef double vmax = 0.0
    for p in range(n):
        u0 = u[0, p]; u1 = u[1, p]; u2 = u[2, p]
        o0 = om[0, p]; o1 = om[1, p]; o2 = om[2, p]
        b0 = b[0, p]; b1 = b[1, p]; b2 = b[2, p]
        j0 = jj[0, p]; j1 = jj[1, p]; j2 = jj[2, p]
        t = th[p]
        out[0, p] = u1 * o2 - u2 * o1 - (b1 * j2 - b2 * j1)
        out[1, p] = u2 * o0 - u0 * o2 - (b2 * j0 - b0 * j2)
        out[2, p] = u0 * o1 - u1 * o0 - (b0 * j1 - b1 * j0)
        out[3, p] = u1 * b2 - u2 * b1
        out[4, p] = u2 * b0 - u0 * b2
        out[5, p] = u0 * b1 - u1 * b0
        out[6, p] = u0 * t
        out[7, p] = u1 * t
        out[8, p] = u2 * t
        s = (sqrt(u0 * u0 + u1 * u1 + u2 * u2)
             + sqrt(b0 * b0 + b1 * b1 + b2 * b2))
        if s > vmax:
            vmax = s
    return vmax


def curl_flat(double complex[:, ::1] f, double[::1] k1, double[::1] k2,
              double[::1] k3, double complex[:, ::1] out):
    """out = 2*pi*i*(k x f), elementwise over flattened coefficients."""
    cdef Py_ssize_t n = k1.shape[0]
    cdef Py_ssize_t p
    cdef double complex tp = 2.0 * M_PI * 1j
    for p in range(n):
        out[0, p] = tp * (k2[p] * f[2, p] - k3[p] * f[1, p])
        out[1, p] = tp * (k3[p] * f[0, p] - k1[p] * f[2, p])
        out[2, p] = tp * (k1[p] * f[1, p] - k2[p] * f[0, p])


def neg_divergence_flat(double complex[:, ::1] q, double[::1] k1,
                        double[::1] k2, double[::1] k3,
                        double complex[::1] out):
    """out = -2*pi*i*(k . q), elementwise over flattened coefficients."""
    cdef Py_ssize_t n = k1.shape[0]
    cdef Py_ssize_t p
    cdef double complex tp = 2.0 * M_PI * 1j
    for p in range(n):
        out[p] = -tp * (k1[p] * q[0, p] + k2[p] * q[1, p] + k3[p] * q[2, p])


def leray_inplace_flat(double complex[:, ::1] v, double[::1] k1,
                       double[::1] k2, double[::1] k3, double[::1] inv_ksq):
    cdef Py_ssize_t n = k1.shape[0]
    cdef Py_ssize_t p
    cdef double complex s
    for p in range(n):
        s = (k1[p] * v[0, p] + k2[p] * v[1, p] + k3[p] * v[2, p]) * inv_ksq[p]
        v[0, p] = v[0, p] - k1[p] * s
        v[1, p] = v[1, p] - k2[p] * s
        v[2, p] = v[2, p] - k3[p] * s

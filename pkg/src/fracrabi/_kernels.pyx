# cython: language_level=3
"""Compiled hot kernels: Taylor summation and the Volterra stepping loop.

Semantics mirror ``_kernels_py`` exactly; that module is the reference.
"""
from libc.math cimport lgamma, exp, cos, sin, sqrt, pow, hypot, INFINITY

import numpy as np
cimport numpy as cnp

cnp.import_array()


def ml_taylor_sum(double alpha, double beta, double ln_r, double theta,
                  int max_terms=10000):
    """See ``_kernels_py.ml_taylor_sum``."""
    cdef double tre = 0.0, tim = 0.0
    cdef double abs_sum = 0.0, max_term = 0.0, mag, expo, kt
    cdef int k, small = 0

    if ln_r == -INFINITY:
        mag = exp(-lgamma(beta))
        return complex(mag, 0.0), mag, mag, 1, True

    for k in range(max_terms):
        expo = k * ln_r - lgamma(alpha * k + beta)
        mag = exp(expo)
        if mag == INFINITY:
            # term exceeds double range: the partial sum is garbage from
            # here on, so report failure instead of accumulating inf/nan
            return complex(tre, tim), INFINITY, INFINITY, k + 1, False
        kt = theta * k
        tre += mag * cos(kt)
        tim += mag * sin(kt)
        abs_sum += mag
        if mag > max_term:
            max_term = mag
        # hypot, not sqrt(tre*tre + ...): the squares overflow near 1e154
        if mag < 1e-16 * hypot(tre, tim):
            small += 1
            if small >= 20:
                return complex(tre, tim), abs_sum, max_term, k + 1, True
        else:
            small = 0
    return complex(tre, tim), abs_sum, max_term, max_terms, False


def volterra_solve(double alpha, cnp.ndarray[cnp.complex128_t, ndim=3] kmat,
                   cnp.ndarray[cnp.complex128_t, ndim=1] psi0,
                   double h, int scheme,
                   cnp.ndarray[cnp.float64_t, ndim=2] wcorr):
    """See ``_kernels_py.volterra_solve``."""
    cdef Py_ssize_t n_steps = kmat.shape[0] - 1
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] psi = np.empty(
        (n_steps + 1, 2), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] g = np.empty(
        (n_steps + 1, 2), dtype=np.complex128)
    cdef Py_ssize_t n, j
    cdef double pref, a0, w_diag
    cdef double complex r0, r1, m00, m01, m10, m11, det
    cdef double[::1] d1
    cdef double[::1] d2
    cdef double[::1] pa

    psi[0, 0] = psi0[0]
    psi[0, 1] = psi0[1]
    if n_steps == 0:
        return psi
    g[0, 0] = kmat[0, 0, 0] * psi0[0] + kmat[0, 0, 1] * psi0[1]
    g[0, 1] = kmat[0, 1, 0] * psi0[0] + kmat[0, 1, 1] * psi0[1]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] pa_np = np.arange(
        0, n_steps + 2, dtype=np.float64)
    if scheme == 0:
        pref = pow(h, alpha) * exp(-lgamma(alpha + 1.0))
        d1_np = (pa_np[1:] ** alpha - pa_np[:-1] ** alpha) * pref
        d1 = d1_np
    else:
        pref = pow(h, alpha) * exp(-lgamma(alpha + 2.0))
        pa1_np = pa_np ** (alpha + 1.0)
        d2_np = (pa1_np[2:] + pa1_np[:-2] - 2.0 * pa1_np[1:-1]) * pref
        d2 = d2_np
        pa_pow = pa_np ** alpha
        pa = pa_pow

    for n in range(1, n_steps + 1):
        r0 = psi[0, 0]
        r1 = psi[0, 1]
        if scheme == 0:
            w_diag = d1[0]
            for j in range(1, n):
                r0 = r0 + d1[n - j] * g[j, 0]
                r1 = r1 + d1[n - j] * g[j, 1]
        else:
            a0 = (pow(n - 1.0, alpha + 1.0) - pa[n] * (n - alpha - 1.0)) * pref
            r0 = r0 + a0 * g[0, 0]
            r1 = r1 + a0 * g[0, 1]
            w_diag = pref
            for j in range(1, n):
                r0 = r0 + d2[n - j - 1] * g[j, 0]
                r1 = r1 + d2[n - j - 1] * g[j, 1]
        if n == 1:
            r0 = r0 + wcorr[1, 0] * g[0, 0]
            r1 = r1 + wcorr[1, 0] * g[0, 1]
            w_diag += wcorr[1, 1]
        elif n == 2:
            r0 = r0 + wcorr[2, 0] * g[0, 0] + wcorr[2, 1] * g[1, 0]
            r1 = r1 + wcorr[2, 0] * g[0, 1] + wcorr[2, 1] * g[1, 1]
            w_diag += wcorr[2, 2]
        else:
            r0 = r0 + (wcorr[n, 0] * g[0, 0] + wcorr[n, 1] * g[1, 0]
                       + wcorr[n, 2] * g[2, 0])
            r1 = r1 + (wcorr[n, 0] * g[0, 1] + wcorr[n, 1] * g[1, 1]
                       + wcorr[n, 2] * g[2, 1])
        m00 = 1.0 - w_diag * kmat[n, 0, 0]
        m01 = -w_diag * kmat[n, 0, 1]
        m10 = -w_diag * kmat[n, 1, 0]
        m11 = 1.0 - w_diag * kmat[n, 1, 1]
        det = m00 * m11 - m01 * m10
        if det == 0:
            raise ArithmeticError(f"singular implicit step at n={n}")
        psi[n, 0] = (m11 * r0 - m01 * r1) / det
        psi[n, 1] = (m00 * r1 - m10 * r0) / det
        g[n, 0] = kmat[n, 0, 0] * psi[n, 0] + kmat[n, 0, 1] * psi[n, 1]
        g[n, 1] = kmat[n, 1, 0] * psi[n, 0] + kmat[n, 1, 1] * psi[n, 1]
    return psi

"""Pure-numpy implementations of the hot kernels.

These are the reference semantics for the compiled extension in
``_kernels.pyx``; `_backend` picks whichever is available.  Both
backends must stay behaviourally identical (see tests/test_backends.py).
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

_EPS = 2.220446049250313e-16
_CHUNK = 128
_SMALL_RUN = 20  # consecutive negligible terms required before stopping


def ml_taylor_sum(alpha: float, beta: float, ln_r: float, theta: float,
                  max_terms: int = 10000):
    """Power-series sum  sum_k exp(k*ln_r - lgamma(alpha*k+beta) + i*k*theta).

    Terms are generated in log space so neither the power nor the gamma
    factor can overflow on its own.  Returns
    ``(value, abs_term_sum, max_term, n_terms, converged)`` where
    ``abs_term_sum``/``max_term`` feed the caller's cancellation estimate.
    """
    if ln_r == -np.inf:  # z == 0
        v = np.exp(-gammaln(beta))
        return complex(v), float(v), float(v), 1, True

    total = 0.0 + 0.0j
    abs_sum = 0.0
    max_term = 0.0
    small = 0
    k0 = 0
    # overflow is not an error here: an inf term trips the bailout below and
    # a saturated abs_sum only inflates the caller's cancellation estimate
    with np.errstate(over="ignore"):
        while k0 < max_terms:
            k = np.arange(k0, min(k0 + _CHUNK, max_terms), dtype=float)
            expo = k * ln_r - gammaln(alpha * k + beta)
            mag = np.exp(expo)
            terms = mag * np.exp(1j * theta * k)
            # scalar scan keeps the "20 consecutive small terms" rule exact
            for i in range(len(k)):
                if not np.isfinite(mag[i]):
                    # term exceeds double range: the partial sum is garbage
                    # from here on, so report failure instead of inf/nan
                    return total, math.inf, math.inf, k0 + i + 1, False
                total += terms[i]
                abs_sum += mag[i]
                if mag[i] > max_term:
                    max_term = mag[i]
                if mag[i] < 1e-16 * abs(total):
                    small += 1
                    if small >= _SMALL_RUN:
                        return total, abs_sum, max_term, k0 + i + 1, True
                else:
                    small = 0
            k0 += _CHUNK
    return total, abs_sum, max_term, max_terms, False


def volterra_solve(alpha: float, kmat: np.ndarray, psi0: np.ndarray,
                   h: float, scheme: int, wcorr: np.ndarray) -> np.ndarray:
    """March the memory-kernel Volterra system on a uniform grid.

    ``kmat[j]`` is the 2x2 right-hand-side matrix at node j (the
    Hamiltonian already divided by i*hbar^alpha); the update is

        psi_n = psi0 + sum_j a_{n,j} kmat[j] @ psi_j

    with product-integration weights ``a`` that integrate the weakly
    singular kernel exactly against piecewise-constant (scheme=0) or
    piecewise-linear (scheme=1) interpolants.  The diagonal term is
    handled implicitly through a 2x2 solve per step.

    ``wcorr`` (shape (n+1, 3), zeros to disable) holds starting-weight
    rows that repair the t^alpha startup layer: row n adds
    wcorr[n, j] * g[j] for j in {0, 1, 2}, with the not-yet-known node
    (j = n for n <= 2) folded into the implicit diagonal.
    """
    n_steps = kmat.shape[0] - 1
    psi = np.empty((n_steps + 1, 2), dtype=np.complex128)
    psi[0] = psi0
    if n_steps == 0:
        return psi

    m = np.arange(0, n_steps + 2, dtype=float)
    if scheme == 0:
        pref = h ** alpha / np.exp(gammaln(alpha + 1.0))
        pa = m ** alpha
        d1 = (pa[1:] - pa[:-1]) * pref          # d1[m-1] = m^a-(m-1)^a, m>=1
    else:
        pref = h ** alpha / np.exp(gammaln(alpha + 2.0))
        pa1 = m ** (alpha + 1.0)
        d2 = (pa1[2:] + pa1[:-2] - 2.0 * pa1[1:-1]) * pref  # index m-1, m>=1
        pa = m ** alpha

    g = np.empty_like(psi)                      # g[j] = kmat[j] @ psi[j]
    g[0] = kmat[0] @ psi[0]
    eye = np.eye(2, dtype=np.complex128)

    for n in range(1, n_steps + 1):
        if scheme == 0:
            # weight on g[j] is d1[n-j]; the implicit g[n] weight is d1[0]
            w_diag = d1[0]
            rhs = psi[0].copy()
            if n > 1:
                rhs += d1[1:n][::-1] @ g[1:n]
        else:
            a0 = ((n - 1.0) ** (alpha + 1.0) - pa[n] * (n - alpha - 1.0)) * pref
            acc = a0 * g[0]
            if n > 1:
                coef = d2[:n - 1][::-1]         # weights on g[1..n-1]
                acc = acc + coef @ g[1:n]
            w_diag = pref
            rhs = psi[0] + acc
        if n == 1:
            rhs = rhs + wcorr[1, 0] * g[0]
            w_diag += wcorr[1, 1]
        elif n == 2:
            rhs = rhs + wcorr[2, 0] * g[0] + wcorr[2, 1] * g[1]
            w_diag += wcorr[2, 2]
        else:
            rhs = rhs + (wcorr[n, 0] * g[0] + wcorr[n, 1] * g[1]
                         + wcorr[n, 2] * g[2])
        mat = eye - w_diag * kmat[n]
        det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
        if det == 0:
            raise ArithmeticError(f"singular implicit step at n={n}")
        psi[n, 0] = (mat[1, 1] * rhs[0] - mat[0, 1] * rhs[1]) / det
        psi[n, 1] = (mat[0, 0] * rhs[1] - mat[1, 0] * rhs[0]) / det
        g[n] = kmat[n] @ psi[n]
    return psi

"""One- and two-parameter Mittag-Leffler functions for complex arguments.

E_{a,b}(z) = sum_k z^k / Gamma(a*k + b) is evaluated by a three-regime
scheme — power series near the origin, an inverse-Laplace parabolic
contour in the intermediate annulus, and the algebraic/exponential
asymptotic expansion at large magnitude — with precision escalation
(float64 -> mpmath) whenever the running cancellation estimate exceeds
the target.  Also provides the singular two-exponent Beta-type integral
and an overflow-safe log-gamma.

Branch convention: all real powers use nonnegative real bases, and
complex powers are principal-branch throughout.  Values for Im(z) < 0
are produced by conjugation symmetry (series coefficients are real), so
``ml_two(a, b, conj(z)) == conj(ml_two(a, b, z))`` holds exactly.
"""
from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, rgamma

from . import _backend
from .errors import ConvergenceError, DomainError

__all__ = ["MLConfig", "DEFAULT_CONFIG", "ml_one", "ml_two", "ml_two_info",
           "beta_integral", "log_gamma"]

_EPS = 2.220446049250313e-16
_LN_OVERFLOW = 700.0  # ln of the largest comfortably representable double
_MP_DPS_CAP = 500
# mpmath's working precision is process-global; serialize rescue passes
_MP_LOCK = threading.Lock()


@dataclass(frozen=True)
class MLConfig:
    """Tunable evaluation thresholds (config keys ``ml.*`` on the CLI)."""
    taylor_radius: float | None = None   # None -> 5*(1+alpha)
    asymptotic_radius: float = 50.0
    tol: float = 1e-10


DEFAULT_CONFIG = MLConfig()


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0, overflow-safe."""
    if not (x > 0) or math.isinf(x):
        raise DomainError(f"log_gamma requires finite x > 0, got {x}")
    return float(gammaln(x))


def _validate(alpha: float, beta: float, z: complex, *, allow_two: bool) -> None:
    ok_alpha = 0.0 < alpha <= 1.0 or (allow_two and alpha == 2.0)
    if not ok_alpha:
        raise DomainError(f"order alpha={alpha} outside (0, 1]")
    if not (beta > 0.0) or math.isinf(beta):
        raise DomainError(f"beta={beta} must be finite and positive")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"argument must be finite, got {z}")


def ml_one(alpha: float, z: complex, config: MLConfig | None = None) -> complex:
    """One-parameter Mittag-Leffler function E_alpha(z) = E_{alpha,1}(z)."""
    return ml_two(alpha, 1.0, z, config)


def ml_two(alpha: float, beta: float, z: complex,
           config: MLConfig | None = None) -> complex:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z).

    alpha must lie in (0, 1]; alpha = 2 is additionally accepted (plain
    series route) so the classical E_2 trigonometric identity can be
    used as a test oracle.
    """
    value, _regime, _count, _est = ml_two_info(alpha, beta, z, config)
    return value


def ml_two_info(alpha: float, beta: float, z: complex,
                config: MLConfig | None = None) -> tuple[complex, str, int, float]:
    """Like :func:`ml_two` but also reports (regime, term/node count, est. rel. error)."""
    cfg = config or DEFAULT_CONFIG
    alpha = float(alpha)
    beta = float(beta)
    z = complex(z)
    _validate(alpha, beta, z, allow_two=True)

    if z.imag < 0.0:  # conjugation symmetry, exact
        value, regime, count, est = _dispatch(alpha, beta, z.conjugate(), cfg)
        value = value.conjugate()
    else:
        value, regime, count, est = _dispatch(alpha, beta, z, cfg)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ConvergenceError(
            f"E_({alpha},{beta})({z}) produced a non-finite value")
    return value, regime, count, est


def _dispatch(alpha: float, beta: float, z: complex,
              cfg: MLConfig) -> tuple[complex, str, int, float]:
    if z == 0:
        return complex(math.exp(-gammaln(beta))), "closed-form", 1, 0.0
    if alpha == 1.0 and beta == 1.0:
        if z.real > _LN_OVERFLOW:
            raise ConvergenceError("exp(z) exceeds double range")
        return cmath.exp(z), "closed-form", 1, _EPS
    if alpha == 1.0 and beta == 2.0:
        if z.real > _LN_OVERFLOW:
            raise ConvergenceError("value exceeds double range")
        if abs(z) >= 1e-4:
            return (cmath.exp(z) - 1.0) / z, "closed-form", 1, _EPS
        # tiny |z|: avoid the subtractive cancellation of expm1 form
        return 1.0 + z / 2 + z * z / 6 + z ** 3 / 24, "closed-form", 4, _EPS

    r0 = cfg.taylor_radius if cfg.taylor_radius is not None else 5.0 * (1.0 + alpha)
    r = abs(z)
    if alpha == 2.0 or beta >= 2.5 or r <= r0:
        return _taylor_ladder(alpha, beta, z, cfg, contour_ok=(alpha <= 1.0 and beta < 2.5))
    if r >= cfg.asymptotic_radius:
        return _asymptotic(alpha, beta, z, cfg)
    try:
        value, nodes = _contour(alpha, beta, z, cfg)
        return value, "contour", nodes, 1e-9
    except _ContourFailed:
        value, regime, count, est = _taylor_ladder(alpha, beta, z, cfg, contour_ok=False)
        return value, regime, count, est


# ---------------------------------------------------------------- Taylor

def _taylor_ladder(alpha: float, beta: float, z: complex, cfg: MLConfig,
                   contour_ok: bool) -> tuple[complex, str, int, float]:
    """Double-precision series with cancellation tracking, escalating to
    the contour or an arbitrary-precision pass when the estimate misses
    the target."""
    ln_r = math.log(abs(z))
    theta = cmath.phase(z)
    floor = 1e-300

    # Peak log-magnitude of the series terms.  For |z| > 1 the terms crest
    # near index (|z|^(1/alpha) - beta)/alpha before the gamma factor takes
    # over; if that crest exceeds the double range the plain backend cannot
    # even represent its own intermediates, so skip it entirely.
    ln_peak = -float(gammaln(beta))
    if ln_r > 0.0:
        x_star = abs(z) ** (1.0 / alpha)
        if not math.isfinite(x_star):
            ln_peak = math.inf
        elif (x_star - beta) / alpha > 0.0:
            ln_peak = max(ln_peak, (x_star - beta) / alpha * ln_r
                          - float(gammaln(x_star)))

    # Worst case: the sum cancels from the crest all the way down to O(1).
    # A failed double pass cannot refine this — its value may be pure
    # cancellation noise, so sizing from max_term/|value| would undershoot.
    lost_digits = 0.4343 * max(ln_peak, 0.0)
    if ln_peak <= _LN_OVERFLOW - 20.0:
        value, abs_sum, max_term, n_terms, converged = _backend.ml_taylor_sum(
            alpha, beta, ln_r, theta)
        est = _EPS * abs_sum / max(abs(value), floor)
        if converged and est <= cfg.tol:
            return value, "taylor", n_terms, est

    if contour_ok:
        try:
            cvalue, nodes = _contour(alpha, beta, z, cfg)
            return cvalue, "contour", nodes, 1e-9
        except _ContourFailed:
            pass

    # arbitrary-precision rescue; digits sized from the tracked cancellation
    dps_f = 25.0 + max(0.0, lost_digits)
    if not math.isfinite(dps_f) or dps_f > _MP_DPS_CAP:
        raise ConvergenceError(
            f"E_({alpha},{beta})({z}): series needs ~{dps_f:.0f} digits "
            f"(> {_MP_DPS_CAP})")
    return _taylor_mp(alpha, beta, z, int(dps_f))


def _taylor_mp(alpha: float, beta: float, z: complex,
               dps: int) -> tuple[complex, str, int, float]:
    import mpmath as mp

    with _MP_LOCK, mp.workdps(dps):
        zz = mp.mpc(z)
        s = mp.mpc(0)
        zk = mp.mpc(1)
        # gamma argument formed in mp: rounding alpha*k+beta to double would
        # poison every large term with an O(1e-16 * k * ln k) relative error
        aa = mp.mpf(alpha)
        bb = mp.mpf(beta)
        thresh_scale = mp.mpf(10) ** (-dps + 3)
        small = 0
        k = 0
        while k < 200000:
            term = zk / mp.gamma(aa * k + bb)
            s += term
            zk *= zz
            k += 1
            if abs(term) < thresh_scale * (abs(s) + thresh_scale):
                small += 1
                if small >= 12:
                    break
            else:
                small = 0
        else:
            raise ConvergenceError("arbitrary-precision series did not terminate")
        try:
            value = complex(s)
        except OverflowError:
            raise ConvergenceError(
                f"E_({alpha},{beta})({z}) exceeds double range") from None
    return value, "taylor-mp", k, 10.0 ** (-dps + 5)


# ------------------------------------------------------------ asymptotic

def _asymptotic(alpha: float, beta: float, z: complex,
                cfg: MLConfig) -> tuple[complex, str, int, float]:
    """Large-|z| expansion: optional exponential branch plus the
    algebraic series -sum_{k>=1} z^{-k}/Gamma(beta - alpha*k), truncated
    at its smallest term."""
    zinv = 1.0 / z
    acc = 0.0 + 0.0j
    piece = zinv
    prev_mag = math.inf
    est = math.inf
    k = 1
    for k in range(1, 200):
        rg = float(rgamma(beta - alpha * k))
        term = piece * rg
        piece *= zinv
        if rg == 0.0:
            # Gamma pole: this term vanishes identically and says nothing
            # about truncation, so it must not trip the minimum detector
            continue
        mag = abs(term)
        if mag > prev_mag:  # optimal truncation reached
            est = prev_mag
            break
        acc -= term
        prev_mag = mag
        if mag <= 1e-3 * cfg.tol * max(abs(acc), 1e-300):
            est = mag
            break
    if math.isinf(est):
        # either every coefficient hit a Gamma pole (series identically
        # zero, e.g. integer alpha and beta) or we ran out of terms
        est = 0.0 if prev_mag == math.inf else prev_mag

    value = acc
    if abs(cmath.phase(z)) < alpha * math.pi:  # pole on the principal sheet
        w = cmath.exp(cmath.log(z) / alpha)
        if w.real > _LN_OVERFLOW:
            raise ConvergenceError(
                f"E_({alpha},{beta})({z}) exceeds double range (exponential branch)")
        expterm = cmath.exp((1.0 - beta) / alpha * cmath.log(z)) * cmath.exp(w) / alpha
        value = value + expterm
    rel = est / max(abs(value), 1e-300)
    return value, "asymptotic", k, rel


# --------------------------------------------------------------- contour

class _ContourFailed(Exception):
    pass


_MU_CANDIDATES = (13.0, 7.0, 19.0, 25.0, 4.5)


def _contour(alpha: float, beta: float, z: complex,
             cfg: MLConfig) -> tuple[complex, int]:
    """Inverse-Laplace evaluation on the parabola s(u) = mu*(1+iu)^2.

    Trapezoid nodes double from 200 to 1600 until two successive passes
    agree to 1e-9.  If the principal-sheet pole s_p = z^(1/alpha) lies to
    the right of the parabola its residue (the exponential branch) is
    added explicitly; candidate mu values are tried until the pole sits
    a safe distance from the contour.
    """
    pole = None
    if abs(cmath.phase(z)) < alpha * math.pi:
        pole = cmath.exp(cmath.log(z) / alpha)

    for mu in _MU_CANDIDATES:
        add_residue = False
        if pole is not None:
            cross = pole.real - mu * (1.0 - (pole.imag / (2.0 * mu)) ** 2)
            if abs(cross) < 1.0:   # too close to the contour: shift it
                continue
            add_residue = cross > 0.0
            if add_residue and pole.real > _LN_OVERFLOW:
                raise ConvergenceError(
                    f"E_({alpha},{beta})({z}) exceeds double range (exponential branch)")

        u_max = math.sqrt(1.0 + 46.0 / mu)
        prev = None
        n = 200
        while n <= 1600:
            u = np.linspace(-u_max, u_max, n + 1)
            s = mu * (1.0 + 1j * u) ** 2
            logs = np.log(s)
            integrand = (np.exp(s + (alpha - beta) * logs)
                         / (np.exp(alpha * logs) - z)) * (1.0 + 1j * u)
            val = complex(np.trapezoid(integrand, dx=u[1] - u[0]) * mu / math.pi)
            if prev is not None and abs(val - prev) <= 1e-9 * (1.0 + abs(val)):
                if add_residue:
                    val += cmath.exp((1.0 - beta) / alpha * cmath.log(z)
                                     ) * cmath.exp(pole) / alpha
                return val, n
            prev = val
            n *= 2
        # node doubling failed for this mu; try the next geometry
    raise _ContourFailed


# ---------------------------------------------------------- Beta integral

def beta_integral(alpha: float, beta: float, x: float, z: float) -> float:
    """The two-exponent endpoint-singular integral

        I(x, z) = int_z^x (x-y)^(-alpha) (y-z)^(-beta) dy
                = (x-z)^(1-alpha-beta) * Gamma(1-alpha)*Gamma(1-beta)/Gamma(2-alpha-beta),

    via the closed form (log-gamma evaluated, so no intermediate overflow).
    Requires alpha < 1, beta < 1 (else divergent) and x > z.
    """
    if alpha >= 1.0 or beta >= 1.0:
        raise DomainError(
            f"beta_integral diverges for alpha={alpha}, beta={beta} (need both < 1)")
    if not x > z:
        raise DomainError(f"beta_integral requires x > z, got x={x}, z={z}")
    lg = (gammaln(1.0 - alpha) + gammaln(1.0 - beta) - gammaln(2.0 - alpha - beta))
    return float((x - z) ** (1.0 - alpha - beta) * math.exp(lg))

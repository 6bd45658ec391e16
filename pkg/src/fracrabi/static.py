"""Static-splitting fractional evolution: Mittag-Leffler phases on the
sigma_z eigenbasis, plus the closed-form polarization for polar-angle
initial states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .mlf import MLConfig, ml_one
from .tls import BlochVector, RabiParams, SpinState, bloch

__all__ = ["StaticEvolution", "static_state", "static_polarization"]


@dataclass(frozen=True)
class StaticEvolution:
    alpha: float
    params: RabiParams
    initial: SpinState

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")


def _phase_arg(ev: StaticEvolution, t: float) -> float:
    if t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t}")
    return (ev.params.omega * t) ** ev.alpha


def static_state(ev: StaticEvolution, t: float,
                 config: MLConfig | None = None) -> SpinState:
    """Componentwise evolution: the upper amplitude picks up
    E_alpha(-i(omega*t)^alpha), the lower its conjugate."""
    x = _phase_arg(ev, t)
    e_down = ml_one(ev.alpha, -1j * x, config)
    return SpinState(e_down * ev.initial.c_plus,
                     e_down.conjugate() * ev.initial.c_minus)


def static_polarization(ev: StaticEvolution, t: float,
                        config: MLConfig | None = None) -> BlochVector:
    """Closed-form Bloch vector for real (polar-angle) initial amplitudes:

        sx = sin(theta) * Re[E^2] / |E|^2,   sy = sin(theta) * Im[E^2] / |E|^2,
        sz = cos(theta),

    with E = E_alpha(+i(omega*t)^alpha).  Must agree with
    ``bloch(static_state(...))`` to the ML accuracy.
    """
    cp, cm = complex(ev.initial.c_plus), complex(ev.initial.c_minus)
    if abs(cp.imag) > 1e-14 or abs(cm.imag) > 1e-14:
        raise DomainError(
            "closed-form polarization requires real (polar-angle) amplitudes")
    n2 = cp.real ** 2 + cm.real ** 2
    if n2 < 1e-24:
        raise DomainError("zero initial state")
    sin_th = 2.0 * cp.real * cm.real / n2
    cos_th = (cp.real ** 2 - cm.real ** 2) / n2

    x = _phase_arg(ev, t)
    e_up = ml_one(ev.alpha, 1j * x, config)
    e2 = e_up * e_up
    mag2 = abs(e_up) ** 2
    return BlochVector(sin_th * e2.real / mag2, sin_th * e2.imag / mag2, cos_th)

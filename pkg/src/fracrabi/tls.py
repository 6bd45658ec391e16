"""Two-level-system domain types, Bloch-vector observables, and the exact
first-order (alpha = 1) driven evolution used as a reference throughout.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError

__all__ = ["SpinState", "RabiParams", "BlochVector", "ObservableSample",
           "state_from_angle", "bloch", "autocorrelation", "tilde_coeffs",
           "exact_rabi_state"]

_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class SpinState:
    """Amplitudes on the sigma_z eigenbasis {|+>, |->}."""
    c_plus: complex
    c_minus: complex

    def __post_init__(self):
        for c in (self.c_plus, self.c_minus):
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise DomainError("state amplitudes must be finite")

    @property
    def norm_sq(self) -> float:
        return abs(self.c_plus) ** 2 + abs(self.c_minus) ** 2

    @classmethod
    def normalized(cls, c_plus: complex, c_minus: complex) -> "SpinState":
        """Construct a unit-norm state, scaling the given amplitudes."""
        n = math.sqrt(abs(complex(c_plus)) ** 2 + abs(complex(c_minus)) ** 2)
        if n < _ZERO_TOL:
            raise DomainError("cannot normalize a (near-)zero state")
        return cls(complex(c_plus) / n, complex(c_minus) / n)


@dataclass(frozen=True)
class RabiParams:
    """Physical parameters of the driven two-level problem.

    ``delta`` is the static level splitting (energy), ``xi`` the drive
    coupling (energy), ``omega_drive`` the drive angular frequency and
    ``hbar`` the action scale.  Everything else is derived: the level
    frequency  ``omega = delta/hbar``, the dimensionless coupling
    ``lam = xi/delta``, the rotating-frame shift
    ``delta_shift = delta - hbar*omega_drive/2``, the mixing angle
    ``gamma_angle = atan2(xi, delta_shift)`` and the dressed energy
    ``epsilon = hypot(delta_shift, xi)``.  At resonance
    (omega_drive = 2*omega) these reduce to gamma_angle = pi/2 and
    epsilon = lam*hbar*omega.
    """
    delta: float = 1.0
    xi: float = 0.1
    omega_drive: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise DomainError(f"delta must be positive and finite, got {self.delta}")
        if not (self.xi >= 0.0 and math.isfinite(self.xi)):
            raise DomainError(f"xi must be nonnegative and finite, got {self.xi}")
        if not (self.omega_drive >= 0.0 and math.isfinite(self.omega_drive)):
            raise DomainError(
                f"omega_drive must be nonnegative and finite, got {self.omega_drive}")
        if not (self.hbar > 0.0 and math.isfinite(self.hbar)):
            raise DomainError(f"hbar must be positive and finite, got {self.hbar}")

    @property
    def omega(self) -> float:
        return self.delta / self.hbar

    @property
    def lam(self) -> float:
        return self.xi / self.delta

    @property
    def delta_shift(self) -> float:
        return self.delta - self.hbar * self.omega_drive / 2.0

    @property
    def gamma_angle(self) -> float:
        return math.atan2(self.xi, self.delta_shift)

    @property
    def epsilon(self) -> float:
        return math.hypot(self.delta_shift, self.xi)


class BlochVector(NamedTuple):
    sx: float
    sy: float
    sz: float


class ObservableSample(NamedTuple):
    """One row of an observable sweep; unused channels are None."""
    alpha: float
    t: float                      # in units of omega*t
    sx: float | None = None
    sy: float | None = None
    sz: float | None = None
    A: float | None = None        # autocorrelation vs. the initial state
    F: float | None = None        # fidelity vs. the exact alpha=1 evolution


def state_from_angle(theta: float) -> SpinState:
    """Polar-angle initial state cos(theta/2)|+> + sin(theta/2)|->."""
    if not (0.0 <= theta < math.pi):
        raise DomainError(f"theta must lie in [0, pi), got {theta}")
    return SpinState(math.cos(theta / 2.0), math.sin(theta / 2.0))


def bloch(state: SpinState) -> BlochVector:
    """Spin polarization (sx, sy, sz) of ``state``, normalized by its norm."""
    n2 = state.norm_sq
    if n2 < _ZERO_TOL ** 2:
        raise DomainError("Bloch vector of a zero state is undefined")
    cross = state.c_plus.conjugate() * state.c_minus
    return BlochVector(2.0 * cross.real / n2, 2.0 * cross.imag / n2,
                       (abs(state.c_plus) ** 2 - abs(state.c_minus) ** 2) / n2)


def autocorrelation(initial: SpinState, evolved: SpinState) -> float:
    """|<initial|evolved>|^2 on unit-normalized representatives."""
    ni, ne = initial.norm_sq, evolved.norm_sq
    if ni < _ZERO_TOL ** 2 or ne < _ZERO_TOL ** 2:
        raise DomainError("autocorrelation of a zero state is undefined")
    overlap = (initial.c_plus.conjugate() * evolved.c_plus
               + initial.c_minus.conjugate() * evolved.c_minus)
    return abs(overlap) ** 2 / (ni * ne)


def tilde_coeffs(params: RabiParams, initial: SpinState) -> tuple[complex, complex]:
    """Expansion coefficients of ``initial`` on the dressed (rotating-frame
    eigen-) basis: a rotation by the mixing angle."""
    if initial.norm_sq < _ZERO_TOL ** 2:
        raise DomainError("cannot expand a zero state")
    half = params.gamma_angle / 2.0
    c, s = math.cos(half), math.sin(half)
    cp, cm = complex(initial.c_plus), complex(initial.c_minus)
    return cp * c + cm * s, cm * c - cp * s


def exact_rabi_state(params: RabiParams, initial: SpinState, t: float) -> SpinState:
    """Exact driven evolution at alpha = 1 (rotating-wave form).

    Propagates with the effective static Hamiltonian
    delta_shift*sigma_z + xi*sigma_x in the frame rotating at
    omega_drive/2, then undoes the frame rotation.  Unitary for all t.
    """
    if t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t}")
    ct_p, ct_m = tilde_coeffs(params, initial)
    half = params.gamma_angle / 2.0
    c, s = math.cos(half), math.sin(half)
    ph = cmath.exp(-1j * params.epsilon * t / params.hbar)
    up = ct_p * ph          # dressed +epsilon branch
    dn = ct_m / ph          # dressed -epsilon branch
    frame = cmath.exp(-1j * params.omega_drive * t / 2.0)
    return SpinState(frame * (up * c - dn * s),
                     (up * s + dn * c) / frame)

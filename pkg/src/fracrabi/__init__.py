"""Fractional-order dynamics of a driven two-level system.

The package evaluates the non-unitary time evolution generated by a
Caputo derivative of order alpha in (0, 1] acting on a two-level system
with a static splitting and a circularly rotating drive: Mittag-Leffler
special functions (`fracrabi.mlf`), the exact integer-order rotating
frame solution (`fracrabi.tls`), the undriven fractional solution
(`fracrabi.static`), the leading-order driven amplitude by two
independent routes (`fracrabi.driven`), and a product-integration
Volterra solver used as a numerical oracle (`fracrabi.volterra`).
A CLI (``frac-rabi``) exposes sweeps, oracle runs and self-checks.

Hot kernels run through a compiled extension when available; set
``FRAC_RABI_PURE_PYTHON=1`` to force the pure-Python fallback (see
`fracrabi.backend_name`).
"""
from ._backend import BACKEND as backend_name
from .errors import ConvergenceError, DomainError, FracRabiError
from .mlf import (DEFAULT_CONFIG, MLConfig, beta_integral, log_gamma, ml_one,
                  ml_two, ml_two_info)
from .tls import (BlochVector, ObservableSample, RabiParams, SpinState,
                  autocorrelation, bloch, exact_rabi_state, state_from_angle,
                  tilde_coeffs)
from .static import StaticEvolution, static_polarization, static_state
from .driven import (DrivenState, MLRayCache, PAlphaResult,
                     autocorrelation_driven, driven_observables,
                     driven_polarization, driven_polarization_closed_form,
                     driven_state, fidelity, fidelity_resonant, greens_kernel,
                     p_alpha_quadrature, p_alpha_series)
from .volterra import (OracleConfig, OracleSolution, driven_hamiltonian,
                       oracle_observables, picard_iterate, solve_ftse,
                       static_hamiltonian)

__version__ = "1.0.0"

__all__ = [
    "__version__", "backend_name",
    "FracRabiError", "DomainError", "ConvergenceError",
    "MLConfig", "DEFAULT_CONFIG", "ml_one", "ml_two", "ml_two_info",
    "beta_integral", "log_gamma",
    "RabiParams", "SpinState", "BlochVector", "ObservableSample",
    "state_from_angle", "bloch", "autocorrelation", "tilde_coeffs",
    "exact_rabi_state",
    "StaticEvolution", "static_state", "static_polarization",
    "PAlphaResult", "DrivenState", "MLRayCache", "greens_kernel",
    "p_alpha_series", "p_alpha_quadrature", "driven_state",
    "driven_polarization", "driven_polarization_closed_form",
    "autocorrelation_driven", "fidelity", "fidelity_resonant",
    "driven_observables",
    "OracleConfig", "OracleSolution", "solve_ftse", "picard_iterate",
    "oracle_observables", "static_hamiltonian", "driven_hamiltonian",
]

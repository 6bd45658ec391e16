"""Independent memory-kernel solver used to police the analytic routes.

Everything here is deliberately slow and literal: uniform product-
integration grids marched step by step, compared against closed forms
that were derived separately.  If the analytic modules drift, this file
is the tripwire.
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import gamma as sp_gamma

from fracrabi import (
    DomainError,
    OracleConfig,
    RabiParams,
    SpinState,
    StaticEvolution,
    driven_hamiltonian,
    exact_rabi_state,
    oracle_observables,
    picard_iterate,
    solve_ftse,
    state_from_angle,
    static_hamiltonian,
    static_state,
    solve_ftse as _solve,  # alias keeps long parametrize lines readable
)


def _amp_dev(sol, ref_states):
    worst = 0.0
    for got, want in zip(sol.states, ref_states):
        worst = max(worst, abs(got.c_plus - want.c_plus),
                    abs(got.c_minus - want.c_minus))
    return worst


class TestStaticAgainstClosedForm:
    @pytest.mark.parametrize("alpha,bound", [(0.4, 1e-3), (0.6, 1e-4), (0.8, 1e-4)])
    def test_trapezoidal_accuracy(self, alpha, bound):
        p = RabiParams(delta=1.0, xi=0.0)
        init = state_from_angle(math.pi / 2)
        cfg = OracleConfig(n_steps=1024, t_max=10.0)
        sol = solve_ftse(alpha, static_hamiltonian(alpha, p), init, cfg)
        ev = StaticEvolution(alpha=alpha, params=p, initial=init)
        ref = [static_state(ev, float(t)) for t in sol.times]
        assert _amp_dev(sol, ref) <= bound

    def test_alpha_one_matches_plane_phases(self):
        p = RabiParams(delta=1.0, xi=0.0)
        init = state_from_angle(1.0)
        cfg = OracleConfig(n_steps=4096, t_max=5.0)
        sol = solve_ftse(1.0, static_hamiltonian(1.0, p), init, cfg)
        for t, s in zip(sol.times, sol.states):
            assert abs(s.c_plus - init.c_plus * np.exp(-1j * t)) <= 1e-6
            assert abs(s.c_minus - init.c_minus * np.exp(1j * t)) <= 1e-6


class TestConvergenceOrder:
    def _static_error(self, alpha, n, scheme):
        p = RabiParams(delta=1.0, xi=0.0)
        init = state_from_angle(math.pi / 2)
        cfg = OracleConfig(n_steps=n, t_max=5.0, scheme=scheme)
        sol = solve_ftse(alpha, static_hamiltonian(alpha, p), init, cfg)
        ev = StaticEvolution(alpha=alpha, params=p, initial=init)
        ref = [static_state(ev, float(t)) for t in sol.times]
        return _amp_dev(sol, ref)

    @pytest.mark.parametrize("alpha", [0.5, 0.8])
    def test_rectangular_halving_gain(self, alpha):
        """Halving the step must shrink the rectangular-rule error by at
        least 1.8x in this alpha range."""
        coarse = self._static_error(alpha, 256, "rectangular_product")
        fine = self._static_error(alpha, 512, "rectangular_product")
        assert coarse / fine >= 1.8, f"gain {coarse / fine:.2f}"

    def test_trapezoidal_is_second_order_at_alpha_one(self):
        coarse = self._static_error(1.0, 256, "trapezoidal_product")
        fine = self._static_error(1.0, 512, "trapezoidal_product")
        assert coarse / fine >= 3.5  # ~2^2 with a little slack

    def test_reported_est_order(self):
        p = RabiParams(delta=1.0, xi=0.1, omega_drive=1.0)
        cfg = OracleConfig(n_steps=1024, t_max=5.0)
        sol = solve_ftse(1.0, driven_hamiltonian(1.0, p), state_from_angle(1.0), cfg)
        assert sol.est_order == pytest.approx(2.0, abs=0.3)

    def test_schemes_agree_on_fine_grids(self):
        p = RabiParams(delta=1.0, xi=0.1, omega_drive=1.0)
        init = state_from_angle(1.0)
        alpha = 0.7
        h = driven_hamiltonian(alpha, p)
        rect = solve_ftse(alpha, h, init,
                          OracleConfig(n_steps=4096, t_max=5.0,
                                       scheme="rectangular_product"))
        trap = solve_ftse(alpha, h, init,
                          OracleConfig(n_steps=4096, t_max=5.0,
                                       scheme="trapezoidal_product"))
        worst = max(abs(a.c_plus - b.c_plus) + abs(a.c_minus - b.c_minus)
                    for a, b in zip(rect.states, trap.states))
        assert worst <= 5e-3


class TestDrivenOracle:
    def test_alpha_one_against_exact_rabi(self):
        p = RabiParams(delta=1.0, xi=0.1, omega_drive=2.0)
        init = SpinState(1.0, 0.0)
        cfg = OracleConfig(n_steps=2048, t_max=5.0)
        sol = solve_ftse(1.0, driven_hamiltonian(1.0, p), init, cfg)
        ref = [exact_rabi_state(p, init, float(t)) for t in sol.times]
        assert _amp_dev(sol, ref) <= 1e-5

    def test_norm_decay_is_fractional_only(self):
        p = RabiParams(delta=1.0, xi=0.1, omega_drive=1.0)
        init = state_from_angle(1.0)
        unit = solve_ftse(1.0, driven_hamiltonian(1.0, p), init,
                          OracleConfig(n_steps=1024, t_max=5.0))
        frac = solve_ftse(0.6, driven_hamiltonian(0.6, p), init,
                          OracleConfig(n_steps=1024, t_max=5.0))
        assert abs(unit.states[-1].norm_sq - 1.0) <= 1e-5
        assert frac.states[-1].norm_sq < 0.95


class TestPicard:
    def test_order_one_is_the_leading_kernel_term(self):
        """A single Picard sweep adds exactly t^alpha/Gamma(alpha+1) times
        the (constant) right-hand-side matrix."""
        alpha = 0.7
        p = RabiParams(delta=1.0, xi=0.0)
        init = state_from_angle(1.0)
        cfg = OracleConfig(n_steps=64, t_max=2.0)
        sol = picard_iterate(alpha, static_hamiltonian(alpha, p), init, 1, cfg)
        gamma_a = sp_gamma(alpha + 1.0)
        for t, s in zip(sol.times, sol.states):
            want_p = init.c_plus * (1.0 - 1j * t ** alpha / gamma_a)
            assert abs(s.c_plus - want_p) <= 1e-10, f"t={t}"

    def test_high_order_converges_to_implicit(self):
        alpha = 0.8
        p = RabiParams(delta=1.0, xi=0.1, omega_drive=1.0)
        init = state_from_angle(1.0)
        cfg = OracleConfig(n_steps=512, t_max=3.0)
        ham = driven_hamiltonian(alpha, p)
        direct = solve_ftse(alpha, ham, init, cfg)
        iterated = picard_iterate(alpha, ham, init, 30, cfg)
        worst = max(abs(a.c_plus - b.c_plus) + abs(a.c_minus - b.c_minus)
                    for a, b in zip(direct.states, iterated.states))
        assert worst <= 1e-9

    def test_successive_orders_shrink_the_update(self):
        alpha = 0.6
        p = RabiParams(delta=1.0, xi=0.1, omega_drive=1.0)
        init = state_from_angle(1.0)
        cfg = OracleConfig(n_steps=256, t_max=2.0)
        ham = driven_hamiltonian(alpha, p)
        prev = None
        gaps = []
        for order in (2, 4, 6, 8):
            sol = picard_iterate(alpha, ham, init, order, cfg)
            tip = np.array([sol.states[-1].c_plus, sol.states[-1].c_minus])
            if prev is not None:
                gaps.append(np.max(np.abs(tip - prev)))
            prev = tip
        assert gaps[0] > gaps[1] > gaps[2]


class TestObservableExtraction:
    def test_rows_carry_all_channels(self):
        p = RabiParams(delta=1.0, xi=0.1, omega_drive=1.0)
        cfg = OracleConfig(n_steps=128, t_max=2.0)
        sol = solve_ftse(0.8, driven_hamiltonian(0.8, p), state_from_angle(1.0), cfg)
        rows = oracle_observables(sol, stride=16)
        assert len(rows) == 129 // 16 + 1
        first = rows[0]
        assert first.t == 0.0
        assert first.A == pytest.approx(1.0, abs=1e-13)
        for row in rows:
            assert math.hypot(math.hypot(row.sx, row.sy), row.sz) <= 1.0 + 1e-9

    def test_stride_validation(self):
        p = RabiParams(delta=1.0, xi=0.0)
        cfg = OracleConfig(n_steps=64, t_max=1.0)
        sol = solve_ftse(0.8, static_hamiltonian(0.8, p), state_from_angle(1.0), cfg)
        with pytest.raises(DomainError):
            oracle_observables(sol, stride=0)


class TestValidation:
    def test_config_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            OracleConfig(n_steps=8, t_max=1.0)
        with pytest.raises(DomainError):
            OracleConfig(n_steps=64, t_max=-1.0)
        with pytest.raises(DomainError):
            OracleConfig(n_steps=64, t_max=1.0, scheme="simpson")
        with pytest.raises(DomainError):
            OracleConfig(n_steps=64, t_max=1.0, picard_order=-2)

    def test_alpha_out_of_range(self):
        p = RabiParams(delta=1.0, xi=0.0)
        cfg = OracleConfig(n_steps=64, t_max=1.0)
        with pytest.raises(DomainError):
            solve_ftse(1.5, static_hamiltonian(1.0, p), state_from_angle(1.0), cfg)

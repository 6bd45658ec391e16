"""Undriven fractional evolution: closed form against limits and symmetry."""
import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracrabi import (
    DomainError,
    RabiParams,
    StaticEvolution,
    SpinState,
    bloch,
    ml_one,
    state_from_angle,
    static_polarization,
    static_state,
)


def _evolution(alpha, theta=math.pi / 2, delta=1.0):
    return StaticEvolution(alpha=alpha, params=RabiParams(delta=delta, xi=0.0),
                           initial=state_from_angle(theta))


class TestFirstOrderLimit:
    def test_alpha_one_is_plane_rotation(self):
        """At alpha = 1 the two levels pick up exp(-/+ i*omega*t) and the
        transverse spin precesses rigidly."""
        ev = _evolution(1.0, theta=1.3)
        for wt in (0.0, 0.7, 3.0, 12.0):
            v = static_polarization(ev, wt)
            assert v.sx == pytest.approx(math.sin(1.3) * math.cos(2 * wt),
                                         abs=1e-12)
            assert v.sy == pytest.approx(math.sin(1.3) * math.sin(2 * wt),
                                         abs=1e-12)
            assert v.sz == pytest.approx(math.cos(1.3), abs=1e-13)

    def test_alpha_one_norm_preserved(self):
        ev = _evolution(1.0)
        for wt in (0.5, 5.0, 40.0):
            assert static_state(ev, wt).norm_sq == pytest.approx(1.0, rel=1e-12)


class TestFractionalPhases:
    def test_amplitudes_are_ml_phases(self):
        alpha, theta = 0.7, 1.0
        ev = _evolution(alpha, theta=theta)
        for wt in (0.4, 2.0, 6.0):
            x = wt ** alpha
            s = static_state(ev, wt)
            assert cmath.isclose(s.c_plus,
                                 math.cos(theta / 2) * ml_one(alpha, -1j * x),
                                 rel_tol=1e-10)
            assert cmath.isclose(s.c_minus,
                                 math.sin(theta / 2) * ml_one(alpha, 1j * x),
                                 rel_tol=1e-10)

    def test_norm_decays_from_one(self):
        """The fractional evolution is non-unitary: |E_a(-ix)| < 1 for
        x > 0, so the raw norm dips below its t=0 value."""
        ev = _evolution(0.6)
        n0 = static_state(ev, 0.0).norm_sq
        assert n0 == pytest.approx(1.0, rel=1e-14)
        assert static_state(ev, 2.0).norm_sq < n0

    def test_sz_constant_after_normalization(self):
        for alpha in (0.4, 0.8):
            ev = _evolution(alpha, theta=0.9)
            for wt in (0.5, 3.0, 20.0):
                assert static_polarization(ev, wt).sz == pytest.approx(
                    math.cos(0.9), abs=1e-12)

    def test_transverse_envelope_identity(self):
        # |sx + i*sy| == sin(theta) exactly once normalized (the conjugate
        # pair of phases cancels in the cross term)
        ev = _evolution(0.5, theta=0.7)
        for wt in (1.0, 9.0, 60.0):
            v = static_polarization(ev, wt)
            assert math.hypot(v.sx, v.sy) == pytest.approx(math.sin(0.7),
                                                           rel=1e-12)


class TestFrequencyFreeze:
    def test_sy_decays_for_fractional_alpha(self):
        """Long after the initial transient the fractional phase angle
        locks and the sy component drains away (memory-induced freeze)."""
        ev = _evolution(0.6)
        mags = [abs(static_polarization(ev, wt).sy) for wt in (50.0, 100.0, 200.0)]
        assert mags[0] > mags[1] > mags[2]

    def test_alpha_one_does_not_freeze(self):
        ev = _evolution(1.0)
        mags = [abs(static_polarization(ev, wt).sy) for wt in (50.0, 100.0, 200.0)]
        assert not (mags[0] > mags[1] > mags[2])


class TestValidation:
    def test_alpha_range(self):
        with pytest.raises(DomainError):
            _evolution(0.0)
        with pytest.raises(DomainError):
            _evolution(1.2)

    def test_negative_time(self):
        ev = _evolution(0.8)
        with pytest.raises(DomainError):
            static_state(ev, -0.5)

    def test_complex_amplitudes_need_the_state_route(self):
        # the closed-form polarization is written for polar-angle (real)
        # amplitudes; anything else must go through the state
        ev = StaticEvolution(alpha=0.9, params=RabiParams(),
                             initial=SpinState.normalized(1.0, 1.0j))
        with pytest.raises(DomainError):
            static_polarization(ev, 1.0)
        v = bloch(static_state(ev, 1.0))
        assert math.hypot(math.hypot(v.sx, v.sy), v.sz) == pytest.approx(
            1.0, rel=1e-12)


class TestGridSweep:
    def test_polarization_matches_state_route(self):
        """static_polarization must equal bloch(static_state) — two paths
        through the same code kept equal as an internal consistency check."""
        ev = _evolution(0.75, theta=1.1)
        for wt in np.linspace(0.1, 10.0, 7):
            direct = static_polarization(ev, float(wt))
            via_state = bloch(static_state(ev, float(wt)))
            assert_allclose([direct.sx, direct.sy, direct.sz],
                            [via_state.sx, via_state.sy, via_state.sz],
                            atol=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heraldshape.errors import InvalidArgument, ResolutionError
from heraldshape.numerics import grid_with_step
from heraldshape.sources import (FiniteWindowExponential, IdealCorrelated, StationaryCW,
                                 correlation_halfwidth, default_window_grid, g1_auto, g1_cross,
                                 ideal_joint_amplitude, joint_amplitude, spectral_halfwidth,
                                 spectral_widths, unconditional_spectrum)

from conftest import STEP, T_C, T_U


class TestModels:
    def test_window_needs_tu_above_tc(self):
        with pytest.raises(InvalidArgument):
            FiniteWindowExponential(t_c=1.0, t_u=1.0)

    def test_cw_low_pump(self):
        with pytest.raises(InvalidArgument):
            StationaryCW(t_c=1.0, pair_rate=1.0)
        StationaryCW(t_c=1.0, pair_rate=0.0)

    def test_nominal_widths(self):
        w = spectral_widths(FiniteWindowExponential(2.0, 300.0))
        assert w.omega_u * 2.0 == pytest.approx(1.0)
        assert w.omega_c * 300.0 == pytest.approx(1.0)
        with pytest.raises(InvalidArgument):
            spectral_widths(IdealCorrelated())


class TestWindowedJoint:
    def test_unit_norm(self, window_joint):
        assert abs(window_joint.norm2 - 1) < 1e-10

    def test_zero_outside_window(self, window_joint):
        t = window_joint.grid_s.times
        outside = (t < 0) | (t > T_U)
        assert outside.any()
        assert np.all(window_joint.samples[outside, :] == 0)
        assert np.all(window_joint.samples[:, outside] == 0)

    def test_diagonal_constant(self, window_joint):
        t = window_joint.grid_s.times
        inside = (t >= 0) & (t <= T_U)
        diag = np.diag(window_joint.samples.real)[inside]
        assert np.ptp(diag) == 0.0

    def test_two_tc_offset_is_one_efold(self, window_joint):
        j = window_joint.grid_s.index_of(50.0)
        k = window_joint.grid_i.index_of(50.0 + 2 * T_C)
        ratio = window_joint.samples[j, k] / window_joint.samples[j, j]
        assert ratio.real == pytest.approx(math.exp(-1), rel=1e-12)

    def test_marginal_flat_in_interior(self, window_joint):
        t = window_joint.grid_s.times
        m = window_joint.signal_marginal()
        interior = (t >= 5 * T_C) & (t <= T_U - 5 * T_C)
        flat = m[interior]
        assert np.ptp(flat) / flat.max() < 2 / 150

    def test_correlation_width(self, window_joint):
        assert abs(correlation_halfwidth(window_joint) - 2 * T_C) <= STEP

    def test_too_coarse(self, window_model):
        with pytest.raises(ResolutionError):
            joint_amplitude(window_model, default_window_grid(window_model, 0.3))

    def test_window_not_contained(self, window_model):
        with pytest.raises(ResolutionError):
            joint_amplitude(window_model, grid_with_step(0, 100, 0.125))

    def test_unconditional_spectrum_width(self, window_joint):
        # |Phi|^2 marginal ~ (1 + 4 w^2 t_c^2)^-2; its 1/e half-width is sqrt(sqrt(e)-1)/(2 t_c)
        width = spectral_halfwidth(unconditional_spectrum(window_joint))
        oracle = math.sqrt(math.sqrt(math.e) - 1) / (2 * T_C)
        assert width == pytest.approx(oracle, rel=0.05)
        # same order as the nominal omega_u = 1/t_c
        assert 0.1 < width * T_C < 10


class TestIdeal:
    def test_structure(self):
        g = grid_with_step(0, 10, 0.5)
        j = ideal_joint_amplitude(g)
        off = j.samples - np.diag(np.diag(j.samples))
        assert np.all(off == 0)
        assert abs(j.norm2 - 1) < 1e-12
        assert np.allclose(j.idler_marginal(), 1 / g.count / g.step)
        assert np.allclose(j.signal_marginal(), 1 / g.count / g.step)


class TestCorrelators:
    model = StationaryCW(t_c=1.5, pair_rate=0.02)

    def test_auto_examples(self):
        n = self.model.pair_rate
        assert g1_auto(self.model, 0.0) == pytest.approx(n)
        assert g1_auto(self.model, 2 * self.model.t_c) == pytest.approx(2 * n / math.e)

    def test_cross_examples(self):
        peak = math.sqrt(self.model.pair_rate / (2 * self.model.t_c))
        assert g1_cross(self.model, 0.0) == pytest.approx(peak)
        assert g1_cross(self.model, 2 * self.model.t_c) == pytest.approx(peak / math.e)

    def test_cross_square_integrates_to_flux(self):
        g = grid_with_step(-60, 60, 1e-3)
        val = np.trapezoid(g1_cross(self.model, g.times) ** 2, dx=g.step)
        assert val == pytest.approx(self.model.pair_rate, rel=1e-6)

    @given(st.floats(-100, 100))
    def test_symmetric_and_bounded(self, dt):
        m = self.model
        assert g1_auto(m, dt) == g1_auto(m, -dt)
        assert g1_cross(m, dt) == g1_cross(m, -dt)
        assert g1_auto(m, dt) <= g1_auto(m, 0.0)
        assert g1_cross(m, dt) <= g1_cross(m, 0.0)

    @given(st.floats(0, 50), st.floats(0, 50))
    def test_monotone_in_abs_dt(self, a, b):
        lo, hi = sorted((a, b))
        assert g1_auto(self.model, hi) <= g1_auto(self.model, lo)
        assert g1_cross(self.model, hi) <= g1_cross(self.model, lo)

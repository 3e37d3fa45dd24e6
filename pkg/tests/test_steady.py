import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavesing.errors import CavitationError, DomainError
from wavesing.fields import Grid2D, VectorField2D
from wavesing.steady import (FlowType, SteadyFlowConfig, classify_type, depth_from_speed,
                             energy_functional, residuals, wave_speed_squared)


def field(grid, fu, fv):
    X, Y = grid.mesh()
    return VectorField2D(grid, fu(X, Y) + 0 * X, fv(X, Y) + 0 * X)


class TestDepth:
    def test_examples(self):
        cfg = SteadyFlowConfig(2.0, 9.8)
        assert depth_from_speed(2.0, cfg) == 0.0
        assert depth_from_speed(0.0, cfg) == pytest.approx(2.0 / 19.6)
        assert depth_from_speed(1.0, cfg) == pytest.approx(1 / 19.6, rel=1e-15)
        assert wave_speed_squared(1.0, cfg) == pytest.approx(0.5)

    def test_cavitation(self):
        with pytest.raises(CavitationError):
            depth_from_speed(2.5, SteadyFlowConfig(2.0, 9.8))

    def test_config(self):
        with pytest.raises(DomainError):
            SteadyFlowConfig(0.0)

    @given(st.floats(0.1, 10), st.floats(0.1, 20), st.floats(0, 1))
    def test_roundtrip(self, C, g, frac):
        cfg = SteadyFlowConfig(C, g)
        h = frac * C / (2 * g)
        assert depth_from_speed(C - 2 * g * h, cfg) == pytest.approx(h, abs=1e-12 * C / g)


class TestResiduals:
    grid = Grid2D.square(-1.0, 1.0, 21)
    cfg = SteadyFlowConfig(10.0, 9.8)

    def test_uniform(self):
        rc, rv = residuals(field(self.grid, lambda x, y: 0.7, lambda x, y: 0.0), self.cfg)
        assert np.all(rc.values == 0) and np.all(rv.values == 0)

    def test_symmetric_shear(self):
        X, Y = self.grid.mesh()
        rc, rv = residuals(field(self.grid, lambda x, y: y, lambda x, y: x), self.cfg)
        np.testing.assert_allclose(rv.values, 0.0, atol=1e-12)
        np.testing.assert_allclose(rc.values, -2 * X * Y, atol=1e-12)

    def test_rotation(self):
        _, rv = residuals(field(self.grid, lambda x, y: -y, lambda x, y: x), self.cfg)
        np.testing.assert_allclose(rv.values, 2.0, atol=1e-12)

    @given(st.floats(-1, 1), st.floats(-1, 1))
    def test_constant_fields_vanish(self, a, b):
        rc, rv = residuals(field(self.grid, lambda x, y: a, lambda x, y: b), self.cfg)
        assert np.all(rc.values == 0) and np.all(rv.values == 0)


class TestClassify:
    def test_all_elliptic_or_hyperbolic(self):
        g = Grid2D.square(-1.0, 1.0, 11)
        cfg = SteadyFlowConfig(3.0)
        slow = classify_type(field(g, lambda x, y: 0.1, lambda x, y: 0.0), cfg)
        assert slow.count(FlowType.ELLIPTIC) == 121
        fast = classify_type(field(g, lambda x, y: 1.5, lambda x, y: 0.0), cfg)
        assert fast.count(FlowType.HYPERBOLIC) == 121

    def test_sonic_circle(self):
        # Q = s^2 r^2 and c^2 = (C - Q)/2 meet at r^2 = C / (3 s^2)
        C, s = 3.0, 1.0
        g = Grid2D.square(-1.2, 1.2, 101)
        X, Y = g.mesh()
        tmap = classify_type(field(g, lambda x, y: s * x, lambda x, y: s * y), SteadyFlowConfig(C))
        r = np.hypot(X, Y)
        r_sonic = np.sqrt(C / 3) / s
        assert np.all(tmap.tags[r < r_sonic - g.hx] == FlowType.ELLIPTIC)
        assert np.all(tmap.tags[r > r_sonic + g.hx] == FlowType.HYPERBOLIC)
        band = tmap.band()
        assert band.any()
        assert np.abs(r[band] - r_sonic).max() <= np.hypot(g.hx, g.hy)

    @given(st.floats(0, 2 * np.pi))
    def test_rotation_invariance(self, theta):
        g = Grid2D.square(-1.0, 1.0, 15)
        ca, sa = np.cos(theta), np.sin(theta)
        fu = lambda x, y: x + 0.3 * y
        fv = lambda x, y: 0.2 * x * y
        cfg = SteadyFlowConfig(4.0)
        base = field(g, fu, fv)
        rot = VectorField2D(g, ca * base.u - sa * base.v, sa * base.u + ca * base.v)
        a, b = classify_type(base, cfg).tags, classify_type(rot, cfg).tags
        disc = np.abs(wave_speed_squared(base.speed_squared, cfg) - base.speed_squared)
        safe = disc > 1e-9
        assert np.array_equal(a[safe], b[safe])


class TestEnergy:
    def test_zero_and_constant(self):
        g = Grid2D.square(0.0, 1.0, 11)
        cfg = SteadyFlowConfig(3.0)
        assert energy_functional(field(g, lambda x, y: 0.0, lambda x, y: 0.0), cfg) == 0.0
        q = 0.64
        e = energy_functional(field(g, lambda x, y: 0.8, lambda x, y: 0.0), cfg)
        assert e == pytest.approx(3.0 * q / 2 - q * q / 4, rel=1e-13)

    def test_subrectangle(self):
        g = Grid2D.square(0.0, 2.0, 21)
        cfg = SteadyFlowConfig(3.0)
        e = energy_functional(field(g, lambda x, y: 0.8, lambda x, y: 0.0), cfg, Grid2D.square(0.0, 1.0, 11))
        assert e == pytest.approx(3.0 * 0.64 / 2 - 0.64**2 / 4, rel=1e-13)

    def test_second_order_convergence(self):
        # Q = x^2 on [0,1]^2 with u = x: exact E = C/6 - 1/20
        C = 3.0
        exact = C / 6 - 1 / 20
        errs = []
        for n in (11, 21, 41):
            g = Grid2D.square(0.0, 1.0, n)
            errs.append(abs(energy_functional(field(g, lambda x, y: x, lambda x, y: 0.0), SteadyFlowConfig(C)) - exact))
        assert 3.6 < errs[0] / errs[1] < 4.4 and 3.6 < errs[1] / errs[2] < 4.4
        # Richardson extrapolation recovers the closed form
        g1 = Grid2D.square(0.0, 1.0, 21)
        g2 = Grid2D.square(0.0, 1.0, 41)
        e1 = energy_functional(field(g1, lambda x, y: x, lambda x, y: 0.0), SteadyFlowConfig(C))
        e2 = energy_functional(field(g2, lambda x, y: x, lambda x, y: 0.0), SteadyFlowConfig(C))
        assert (4 * e2 - e1) / 3 == pytest.approx(exact, abs=1e-7)

    @given(st.floats(0, 1), st.floats(0, 0.5))
    def test_monotone(self, a, bump):
        g = Grid2D.square(0.0, 1.0, 9)
        cfg = SteadyFlowConfig(4.0)
        e1 = energy_functional(field(g, lambda x, y: a * x, lambda x, y: 0.0), cfg)
        e2 = energy_functional(field(g, lambda x, y: a * x + bump, lambda x, y: 0.0), cfg)
        assert e2 >= e1 - 1e-15

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavesing.errors import DomainError, ParabolicDegeneracyError
from wavesing.fields import Grid2D
from wavesing.hodograph import (FCoefficient, HodographPoint, degeneracy_factor,
                                elliptic_region_test, jacobian_closed_form, jacobian_numerator,
                                verify_theorem_numerically)

unity = FCoefficient.unity()


class TestJacobian:
    def test_trivial_zero(self):
        p = HodographPoint.from_x_derivatives(0.3, 0.2, 0.0, 0.0, unity)
        assert p.y_u == 0 and p.y_v == 0
        pair = jacobian_closed_form(p, unity)
        assert pair.direct == 0 and pair.closed_form == 0

    def test_hand_value(self):
        p = HodographPoint.from_x_derivatives(0.5, 0.0, 1.0, 0.0, unity)
        pair = jacobian_closed_form(p, unity)
        oracle = -((1 - 0.25) * 1) ** 2 / ((1 - 0.25) * (1 - 0))
        assert oracle == -0.75
        assert pair.value == pytest.approx(oracle, rel=1e-15)
        assert pair.direct == pytest.approx(oracle, rel=1e-15)

    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_u_axis_factor_vanishes(self, xu, xv):
        p = HodographPoint(1.0, 0.0, xu, xv, xv, 0.0)
        assert degeneracy_factor(p, unity) == 0.0
        assert jacobian_numerator(p, unity) == 0.0

    def test_degenerate_denominator(self):
        with pytest.raises(ParabolicDegeneracyError):
            jacobian_closed_form(HodographPoint(1.0, 0.0, 1.0, 0.0, 0.0, 0.0), unity)

    def test_contract_violations(self):
        with pytest.raises(DomainError):
            jacobian_closed_form(HodographPoint(0.1, 0.1, 1.0, 0.5, 0.4, 0.0), unity)
        with pytest.raises(DomainError):
            HodographPoint(0.1, np.nan, 1.0, 0.5, 0.5, 0.0)

    @given(st.floats(-0.95, 0.95), st.floats(0, 2 * np.pi), st.floats(-10, 10), st.floats(-10, 10))
    def test_agreement_and_sign(self, rho, th, xu, xv):
        u, v = rho * np.cos(th), rho * np.sin(th)
        p = HodographPoint.from_x_derivatives(u, v, xu, xv, unity)
        pair = jacobian_closed_form(p, unity)
        scale = max(abs(pair.direct), abs(pair.closed_form))
        assert abs(pair.direct - pair.closed_form) <= 1e-12 * scale + 1e-300
        assert pair.value <= 0.0
        if pair.value == 0.0:
            # exact zero only for vanishing derivatives (up to underflow)
            assert abs(xu) < 1e-150 and abs(xv) < 1e-150

    @given(st.floats(1.2, 3), st.floats(0, 2 * np.pi), st.floats(-3, 3), st.floats(-3, 3))
    def test_quartic_agreement(self, rho, th, xu, xv):
        f = FCoefficient.quartic()
        u, v = rho * np.cos(th), rho * np.sin(th)
        fv = f(u, v)
        if abs((fv - u * u) * (fv - v * v)) < 1e-6:
            return
        pair = jacobian_closed_form(HodographPoint.from_x_derivatives(u, v, xu, xv, f), f)
        assert pair.value <= 0.0


class TestEllipticRegion:
    def test_examples(self):
        q = FCoefficient.quartic()
        assert elliptic_region_test(0.5, 0.0, q) is False
        assert elliptic_region_test(2.0, 0.0, q) is True
        assert elliptic_region_test(0.0, 0.0, unity) is True
        mask = elliptic_region_test(np.array([0.0, 1.5]), np.array([0.0, 0.0]), unity)
        assert mask.tolist() == [True, False]


class TestTheorem:
    def test_constant_boundary(self):
        g = Grid2D.square(-1.0, 1.0, 41)
        rep = verify_theorem_numerically(unity, g, lambda u, v: 2.0 + 0 * u, radius=0.8)
        np.testing.assert_allclose(rep.x[rep.interior], 2.0, atol=1e-12)
        assert rep.n_near_zero == rep.n_interior

    def test_linear_boundary_all_negative(self):
        g = Grid2D.square(-1.0, 1.0, 81)
        rep = verify_theorem_numerically(unity, g, lambda u, v: u, radius=0.8)
        assert rep.n_nonnegative == 0
        assert rep.max_J < 0
        assert rep.max_rel_mismatch <= 1e-12

    def test_manufactured_solution_second_order(self):
        # theta = atan2(v, u) solves the potential form of the f = 1 system,
        # so x = theta_u = -v / r^2 is exact on any disc avoiding the origin
        exact = lambda u, v: -v / (u * u + v * v)
        errs = []
        for n in (41, 81, 161):
            g = Grid2D(0.15, 0.85, -0.35, 0.35, n, n)
            rep = verify_theorem_numerically(unity, g, exact, radius=0.3, center=(0.5, 0.0))
            U, V = g.mesh()
            errs.append(np.abs(rep.x - exact(U, V))[rep.interior].max())
            assert rep.n_nonnegative == 0
        assert 3.3 < errs[0] / errs[1] < 4.7 and 3.3 < errs[1] / errs[2] < 4.7

    def test_zero_set_does_not_grow(self):
        fracs = []
        for n in (41, 81, 161):
            g = Grid2D.square(-1.0, 1.0, n)
            rep = verify_theorem_numerically(unity, g, lambda u, v: u * v + u, radius=0.8)
            fracs.append(rep.near_zero_fraction)
        assert fracs[2] <= fracs[0] + 1e-12

    def test_quartic_off_centre(self):
        f = FCoefficient.quartic()
        g = Grid2D(1.4, 2.6, -0.6, 0.6, 41, 41)
        rep = verify_theorem_numerically(f, g, lambda u, v: u + v, radius=0.5, center=(2.0, 0.0))
        assert rep.fraction_negative >= 0.999
        assert rep.max_rel_mismatch <= 1e-12

    def test_leaving_elliptic_region(self):
        g = Grid2D.square(-1.0, 1.0, 21)
        with pytest.raises(DomainError):
            verify_theorem_numerically(unity, g, lambda u, v: u, radius=1.2)

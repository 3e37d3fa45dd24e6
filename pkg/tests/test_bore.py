from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavesing.bore import (BoreInput, Regime, elevation_exact, elevation_first_order, froude,
                           relation_sides)
from wavesing.errors import DomainError, SingularRegimeError


def cubic_oracle(H, d, u, g):
    """Root of the expanded cubic nearest the origin, via numpy's companion matrix."""
    # 2g e^3 + (4gH - u^2) e^2 + (2gH^2 - 2Hu^2) e + u^2 (2H + d) d = 0
    coeffs = [2 * g, 4 * g * H - u * u, 2 * g * H * H - 2 * H * u * u, u * u * (2 * H + d) * d]
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-9].real
    return real[np.argmin(np.abs(real))]


class TestFroude:
    def test_examples(self):
        r = froude(1.0, 2.0)
        assert (r.froude, r.tag) == (0.5, Regime.TRANQUIL)
        assert froude(2.0, 2.0).tag is Regime.CRITICAL
        r = froude(4.0, 2.0)
        assert (r.froude, r.tag) == (2.0, Regime.SHOOTING)
        assert froude(-1.0, 2.0).froude == 0.5

    def test_bad_speed(self):
        with pytest.raises(DomainError):
            froude(1.0, 0.0)

    @given(st.floats(-100, 100), st.floats(0.01, 100), st.floats(0.01, 100))
    def test_scale_invariance(self, u, c, lam):
        F = abs(u) / c
        if abs(F - 1) < 1e-9:
            return
        assert froude(u, c).tag == froude(lam * u, lam * c).tag


class TestFirstOrder:
    def test_zero_rise(self):
        assert elevation_first_order(BoreInput(1.0, 0.0, 1.0, 9.8)) == 0.0

    def test_example(self):
        oracle = float(Fraction(1, 100) / (1 - Fraction(98, 10)))
        eps = elevation_first_order(BoreInput(1.0, 0.01, 1.0, 9.8))
        assert eps == pytest.approx(oracle, rel=1e-14)
        assert eps == pytest.approx(-0.001136363636, rel=1e-10)

    def test_sign_rule(self):
        assert elevation_first_order(BoreInput(1.0, 0.01, 1.0, 9.8)) < 0
        assert elevation_first_order(BoreInput(1.0, 0.01, 5.0, 9.8)) > 0

    def test_singular(self):
        with pytest.raises(SingularRegimeError):
            elevation_first_order(BoreInput(1.0, 0.01, 0.0, 9.8))
        with pytest.raises(SingularRegimeError):
            elevation_first_order(BoreInput(1.0, 0.01, float(np.sqrt(9.8)), 9.8))

    def test_input_validation(self):
        for args in [(-1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (1.0, 0.0, 1.0, 0.0)]:
            with pytest.raises(DomainError):
                BoreInput(*args)

    def test_large_rise_warns(self):
        with pytest.warns(RuntimeWarning):
            elevation_first_order(BoreInput(1.0, 0.2, 1.0, 9.8))

    @given(st.floats(-0.09, 0.09), st.floats(-0.09, 0.09))
    def test_linear_in_delta(self, d1, d2):
        base = dict(H=1.0, u=1.0, g=9.8)
        e = lambda d: elevation_first_order(BoreInput(delta=d, **base))
        lhs = e(d1) + e(d2)
        if abs(d1 + d2) < 0.09:
            assert e(d1 + d2) == pytest.approx(lhs, abs=1e-16)
        assert e(2 * d1 / 3) == pytest.approx(2 * e(d1) / 3, abs=1e-17)


class TestExact:
    def test_zero_rise(self):
        assert elevation_exact(BoreInput(1.0, 0.0, 1.0, 9.8)) == 0.0

    @pytest.mark.parametrize("u", [1.0, 0.5, 5.0])
    @pytest.mark.parametrize("delta", [1e-2, -3e-3, 1e-4])
    def test_matches_cubic_oracle(self, u, delta):
        inp = BoreInput(1.0, delta, u, 9.8)
        eps = elevation_exact(inp)
        assert eps == pytest.approx(cubic_oracle(1.0, delta, u, 9.8), rel=1e-9)
        lhs, rhs = relation_sides(inp, eps)
        assert abs(lhs - rhs) <= 1e-13 * max(abs(lhs), abs(rhs), 1.0)

    def test_quadratic_error(self):
        errs = [abs(elevation_exact(BoreInput(1.0, d, 1.0, 9.8)) - elevation_first_order(BoreInput(1.0, d, 1.0, 9.8)))
                for d in (1e-2, 1e-3, 1e-4)]
        r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
        assert 80 <= r1 <= 120 and 80 <= r2 <= 120
        # Richardson estimate of the quadratic constant bounds the finest error
        K = errs[1] / 1e-6
        assert errs[2] <= 1.1 * K * 1e-8

    def test_continuous_branch(self):
        ds = np.linspace(-1e-3, 1e-3, 81)
        eps = np.array([elevation_exact(BoreInput(1.0, d, 1.0, 9.8)) for d in ds])
        assert np.all(np.diff(eps) < 0)
        assert np.max(np.abs(np.diff(eps))) < 2 * np.abs(eps).max() / 40

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavesing import wavefront as wf
from wavesing.errors import DomainError, NumericalInputError

P, M = wf.Direction.PLUS, wf.Direction.MINUS
quartic = wf.SourceCurve.quartic()


def closed_form_quartic(x, t, sign):
    """Printed quartic front and its x-derivative, written out by hand."""
    r = np.sqrt(1 + 16 * x**6)
    s1 = x - sign * 4 * x**3 * t / r
    s2 = x**4 + sign * t / r
    d1 = 1 - sign * 12 * x**2 * t / r**3
    d2 = 4 * x**3 + sign * (-48 * x**5 * t) / r**3
    return s1, s2, d1, d2


class TestNormal:
    def test_examples(self):
        flat = wf.SourceCurve.graph(lambda x: 0 * x + 2.0, lambda x: 0 * x)
        np.testing.assert_array_equal(wf.unit_normal(flat, 0.3), [0.0, 1.0])
        diag = wf.SourceCurve.graph(lambda x: x, lambda x: 0 * x + 1.0)
        np.testing.assert_allclose(wf.unit_normal(diag, 0.3), [-1 / np.sqrt(2), 1 / np.sqrt(2)], rtol=1e-15)

    @given(st.floats(-2, 2))
    def test_unit_length(self, x):
        n = wf.unit_normal(quartic, x)
        assert abs(np.hypot(*n) - 1) <= 1e-15
        fp = 4 * x**3
        np.testing.assert_allclose(n, [-fp / np.sqrt(1 + fp * fp), 1 / np.sqrt(1 + fp * fp)], rtol=1e-14, atol=1e-300)


class TestEvolve:
    def test_identity_at_zero(self):
        front = wf.evolve(quartic, 0.0, P, 51)
        np.testing.assert_array_equal(front.curve.points, quartic.point(quartic.samples(51)))

    @pytest.mark.parametrize("sign,direction", [(1, P), (-1, M)])
    def test_closed_forms(self, sign, direction):
        xs = np.linspace(-1.5, 1.5, 61)
        for t in (0.3, 1.0, 4.0):
            front = wf.evolve(quartic, t, direction, xs)
            s1, s2, d1, d2 = closed_form_quartic(xs, t, sign)
            np.testing.assert_allclose(front.curve.points[:, 0], s1, rtol=1e-14, atol=1e-14)
            np.testing.assert_allclose(front.curve.points[:, 1], s2, rtol=1e-14, atol=1e-14)
            np.testing.assert_allclose(front.tangent[:, 0], d1, rtol=1e-13, atol=1e-13)
            np.testing.assert_allclose(front.tangent[:, 1], d2, rtol=1e-13, atol=1e-13)

    def test_printed_derivative_value(self):
        front = wf.evolve(quartic, 1.0, P, np.array([0.5, 1.0, 1.5]))
        assert front.tangent[1, 0] == pytest.approx(1 - 12 / 17**1.5, rel=1e-15)
        hand = 1 - 12 / 17**1.5
        assert hand == pytest.approx(0.8287984, abs=1e-7)

    def test_circle(self):
        R = 2.0
        c = wf.SourceCurve.circle(R)
        out = wf.evolve(c, 1.5, M, 100)
        np.testing.assert_allclose(np.hypot(*out.curve.points.T), R + 1.5, rtol=1e-15)
        assert wf.singular_times(c, M, (0.0, 6.0, 20)) == []
        inward = wf.evolve(c, R, P, 100)
        np.testing.assert_allclose(inward.curve.points, 0.0, atol=1e-15)
        assert wf.detect_front_singularities(inward, 1e-12) == list(range(100))
        for _, t in wf.singular_times(c, P, (0.0, 6.0, 20)):
            assert t == pytest.approx(R, rel=1e-14)

    def test_negative_time(self):
        with pytest.raises(DomainError):
            wf.evolve(quartic, -1.0, P)
        with pytest.raises(DomainError):
            wf.evolve(quartic, 1.0, P, np.array([3.0]))

    @given(st.floats(-2, 1.9), st.floats(0, 20), st.sampled_from([P, M]))
    def test_unit_speed(self, x, t, d):
        xs = np.array([x, x + 0.05, x + 0.1])
        front = wf.evolve(quartic, t, d, xs)
        base = quartic.point(xs)
        dist = np.hypot(*(front.curve.points - base).T)
        # adding t n to the point rounds at the scale of the point itself
        floor = 4 * np.finfo(float).eps * (np.abs(base).max() + t)
        np.testing.assert_allclose(dist, t, rtol=1e-14, atol=floor)

    @given(st.floats(-1.9, 1.9), st.floats(0, 5))
    def test_direction_symmetry(self, x, t):
        rev = quartic.reversed()
        xs = np.array([x - 0.05, x, x + 0.05])
        a = wf.evolve(quartic, t, P, xs).curve.points
        b = wf.evolve(rev, t, M, -xs[::-1]).curve.points[::-1]
        np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-14)


class TestSingularTimes:
    def test_quartic_closed_form(self):
        xs = np.linspace(0.2, 2.0, 50)
        got = wf.singular_times(quartic, P, xs)
        assert len(got) == 50
        x, t = np.array(got).T
        np.testing.assert_allclose(t, quartic_singular_time_hand(x), rtol=1e-9)

    def test_x_equals_one(self):
        (x, t), = wf.singular_times(quartic, P, [1.0])
        assert t == pytest.approx(17 * np.sqrt(17) / 12, rel=1e-14)
        assert t == pytest.approx(5.84106, abs=1e-5)

    def test_minus_never_singular(self):
        assert wf.singular_times(quartic, M, (-2.0, 2.0, 41)) == []
        missing = wf.singular_times(quartic, M, (0.2, 2.0, 5), include_missing=True)
        assert [t for _, t in missing] == [None] * 5

    def test_flat_point_has_no_root(self):
        assert wf.singular_times(quartic, P, [0.0]) == []

    def test_first_singular_time(self):
        s, t = wf.first_singular_time(quartic, P, (0.1, 2.0))
        x_star = (1 / 56) ** (1 / 6)
        # 672 x^6 = 12 from differentiating the closed form
        assert 672 * x_star**6 == pytest.approx(12)
        assert s == pytest.approx(x_star, abs=1e-6)
        assert t == pytest.approx(quartic_singular_time_hand(x_star), rel=1e-12)
        assert wf.first_singular_time(quartic, M, (0.1, 2.0)) is None

    def test_detect_before_and_at(self):
        x_star = (1 / 56) ** (1 / 6)
        t_min = quartic_singular_time_hand(x_star)
        xs = np.linspace(0.1, 2.0, 381)
        assert wf.detect_front_singularities(wf.evolve(quartic, 0.9 * t_min, P, xs), 1e-3) == []
        x0 = 1.0
        front = wf.evolve(quartic, quartic_singular_time_hand(x0), P, xs)
        hits = wf.detect_front_singularities(front, 1e-2)
        assert hits
        assert np.abs(xs[hits] - x0).min() <= xs[1] - xs[0]

    def test_swallowtail_after_focus(self):
        front = wf.evolve(quartic, 3.0, P, 801)
        assert len(wf.self_intersections(front)) >= 1
        assert len(wf.self_intersections(wf.evolve(quartic, 0.4, P, 801))) == 0

    def test_table_source(self):
        x = np.linspace(-2, 2, 401)
        tab = wf.SourceCurve.from_table(x, x**4)
        (s, t), = wf.singular_times(tab, P, [1.0])
        assert t == pytest.approx(quartic_singular_time_hand(1.0), rel=1e-3)
        with pytest.raises(NumericalInputError):
            wf.SourceCurve.from_table([0, 1, 1, 2], [0, 1, 2, 3])


def quartic_singular_time_hand(x):
    return (1 + (4 * x**3) ** 2) ** 1.5 / (12 * x**2)

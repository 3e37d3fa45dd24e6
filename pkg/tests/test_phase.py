import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from wavesing import phase as ph
from wavesing.errors import DomainError, IndeterminatePhaseError, LoopResolutionError
from wavesing.fields import ComplexField2D, Grid2D


def cfield(grid, fn):
    return ComplexField2D.from_function(grid, fn)


def brute_winding(fn, center, radius, n=10_000):
    """Phase change of ``fn`` around a dense parametric circle, unwrapped with numpy."""
    th = np.linspace(0, 2 * np.pi, n + 1)
    z = fn(center[0] + radius * np.cos(th), center[1] + radius * np.sin(th))
    return np.sum(np.diff(np.unwrap(np.angle(z)))) / (2 * np.pi)


G = Grid2D.square(-2.0, 2.0, 81)
VORTEX = lambda x, y: x + 1j * y
DIPOLE = lambda x, y: (x + 1j * y) * (x - 1 - 1j * y)


class TestDecompose:
    def test_examples(self):
        d = ph.decompose(cfield(G, lambda x, y: 1 + 0 * x))
        assert np.all(d.alpha.values == 1) and np.all(d.chi.values == 0)
        d = ph.decompose(cfield(G, lambda x, y: 1j + 0 * x))
        np.testing.assert_allclose(d.chi.values, np.pi / 2)
        d = ph.decompose(cfield(G, VORTEX))
        X, Y = G.mesh()
        np.testing.assert_allclose(d.alpha.values, np.hypot(X, Y), rtol=1e-15)
        ok = ~d.indeterminate
        assert d.indeterminate[40, 40] and d.indeterminate.sum() == 1
        np.testing.assert_allclose(d.chi.values[ok], np.arctan2(Y, X)[ok], atol=1e-15)

    def test_branch(self):
        d = ph.decompose(cfield(G, lambda x, y: -1 + 0 * x - 0j))
        assert np.all(d.chi.values == np.pi)

    @given(st.integers(0, 2**32 - 1))
    def test_reconstruction(self, seed):
        r = np.random.default_rng(seed)
        g = Grid2D.square(0, 1, 7)
        z = r.normal(size=g.shape) + 1j * r.normal(size=g.shape)
        d = ph.decompose(ComplexField2D(g, z))
        assert np.all((d.chi.values > -np.pi) & (d.chi.values <= np.pi))
        ok = d.alpha.values > d.threshold
        np.testing.assert_allclose(d.reconstruct().values[ok], z[ok], rtol=0, atol=1e-12 * np.abs(z).max())


class TestCurrent:
    def test_constant_and_plane(self):
        j = ph.current(ph.decompose(cfield(G, lambda x, y: 2 * np.exp(0.4j) + 0 * x)))
        assert np.all(j.u == 0) and np.all(j.v == 0)
        k = 1.3
        j = ph.current(ph.decompose(cfield(G, lambda x, y: np.exp(1j * k * x))))
        np.testing.assert_allclose(j.u, k, rtol=1e-12)
        np.testing.assert_allclose(j.v, 0, atol=1e-12)

    def test_vortex_azimuthal(self):
        g = Grid2D.square(-2.0, 2.0, 401)
        j = ph.current(ph.decompose(cfield(g, VORTEX)))
        X, Y = g.mesh()
        r = np.hypot(X, Y)
        far = r > 0.3
        np.testing.assert_allclose(np.hypot(j.u, j.v)[far], r[far], rtol=2e-3)
        radial = (j.u * X + j.v * Y)[far] / r[far]
        assert np.abs(radial).max() < 2e-3 * r[far].max()
        assert j.u[300, 200] < 0  # counterclockwise: flows in -x above the origin


class TestWinding:
    def test_trivial(self):
        d = ph.decompose(cfield(G, lambda x, y: 1 + 0 * x))
        assert ph.winding_number(d, ph.circle_loop(G, (0.3, 0.1), 1.2)) == 0

    def test_unit_circle(self):
        d = ph.decompose(cfield(G, VORTEX))
        assert ph.winding_number(d, ph.circle_loop(G, (0, 0), 1.0)) == 1
        conj = ph.decompose(cfield(G, VORTEX).conjugate())
        assert ph.winding_number(conj, ph.circle_loop(G, (0, 0), 1.0)) == -1

    def test_dipole(self):
        assert brute_winding(DIPOLE, (0.5, 0), 1.5) == pytest.approx(0, abs=1e-9)
        d = ph.decompose(cfield(G, DIPOLE))
        assert ph.winding_number(d, ph.circle_loop(G, (0.5, 0.0), 1.4)) == 0
        assert ph.winding_number(d, ph.circle_loop(G, (0.0, 0.0), 0.5)) == 1
        assert ph.winding_number(d, ph.circle_loop(G, (1.0, 0.0), 0.5)) == -1

    def test_errors(self):
        d = ph.decompose(cfield(G, VORTEX))
        with pytest.raises(IndeterminatePhaseError):
            ph.winding_number(d, [(40, 40), (40, 41), (41, 41)])
        # charge 4 seen through 8 nodes: every step is close to pi and has no reliable sign
        coarse = ph.decompose(cfield(Grid2D.square(-1, 1, 3), lambda x, y: (x + 0.01 + 1j * (y + 0.02)) ** 4))
        with pytest.raises(LoopResolutionError):
            ph.winding_number(coarse, ph.boundary_loop(coarse.grid))

    @given(st.floats(0.3, 1.8), st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))
    def test_deformation_invariance(self, radius, cx, cy):
        d = ph.decompose(cfield(G, VORTEX))
        assert ph.winding_number(d, ph.circle_loop(G, (cx, cy), radius)) == 1

    @given(st.floats(0.2, 1.5))
    def test_conjugation_antisymmetry(self, radius):
        f = cfield(G, DIPOLE)
        loop = ph.circle_loop(G, (0.1, 0.05), radius)
        d = ph.decompose(f)
        assume(not d.indeterminate[loop[:, 0], loop[:, 1]].any())
        a = ph.winding_number(d, loop)
        b = ph.winding_number(ph.decompose(f.conjugate()), loop)
        assert a == -b


def four_vortex(x, y):
    return ((x + 1.03 + 1j * (y + 1.01)) * (x - 0.97 - 1j * (y + 0.99)) *
            (x + 0.98 + 1j * (y - 1.02)) * (x - 1.01 + 1j * (y - 0.96)) ** 2)


class TestDetect:
    def test_zero_free(self):
        assert ph.detect_amphidromic(ph.decompose(cfield(G, lambda x, y: np.exp(1j * x)))) == []

    def test_single_vortex(self):
        env = lambda x, y: np.exp(-(x * x + y * y) / 4)
        pts = ph.detect_amphidromic(ph.decompose(cfield(G, lambda x, y: VORTEX(x, y) * env(x, y))))
        assert len(pts) == 1 and pts[0].charge == 1
        assert pts[0].position == pytest.approx((0.0, 0.0), abs=1e-12)
        pts = ph.detect_amphidromic(ph.decompose(cfield(G, lambda x, y: np.conj(VORTEX(x, y)) * env(x, y))))
        assert len(pts) == 1 and pts[0].charge == -1

    def test_off_node_vortex(self):
        pts = ph.detect_amphidromic(ph.decompose(cfield(G, lambda x, y: x - 0.33 + 1j * (y + 0.41))))
        assert len(pts) == 1 and pts[0].charge == 1
        assert np.hypot(pts[0].position[0] - 0.33, pts[0].position[1] + 0.41) <= np.hypot(G.hx, G.hy)

    def test_additivity_four_vortices(self):
        d = ph.decompose(cfield(G, four_vortex))
        pts = ph.detect_amphidromic(d)
        # factor charges: +1, -1 (conjugated factor), +1, +2 (squared)
        assert sorted(p.charge for p in pts) == [-1, 1, 1, 2]
        total = ph.winding_number(d, ph.boundary_loop(G))
        assert total == sum(p.charge for p in pts) == int(ph.plaquette_charges(d).sum()) == 3
        for p in pts:
            assert ph.winding_number(d, ph.circle_loop(G, p.position, 0.5)) == p.charge

    def test_harmonic_vortex(self):
        g = Grid2D.square(-2.0, 2.0, 61)
        f = ph.harmonic_field(g, [{"amplitude": 1.0, "phase_lag": 0.3,
                                   "spatial": {"type": "vortex", "center": [0.5, -0.5], "charge": -2,
                                               "width": 2.0}}])
        pts = ph.detect_amphidromic(ph.decompose(f))
        assert [p.charge for p in pts] == [-2]
        # centre sits mid-cell, so the reported node is a corner of that cell
        assert np.hypot(pts[0].position[0] - 0.5, pts[0].position[1] + 0.5) <= np.hypot(g.hx, g.hy)

    @given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.sampled_from([-3, -2, 2, 3]))
    def test_higher_charge_anywhere(self, cx, cy, q):
        g = Grid2D.square(-2.0, 2.0, 61)
        f = ph.harmonic_field(g, [{"amplitude": 1.0, "phase_lag": 0.0,
                                   "spatial": {"type": "vortex", "center": [cx, cy], "charge": q,
                                               "width": 2.0}}])
        pts = ph.detect_amphidromic(ph.decompose(f))
        assert [p.charge for p in pts] == [q]


class TestCotidal:
    def test_plane_wave(self):
        k = 2.0
        d = ph.decompose(cfield(G, lambda x, y: np.exp(1j * k * x)))
        for phi in (0.5, -1.0):
            lines = ph.cotidal_lines(d, [phi])
            xs = np.concatenate([c.points[:, 0] for c in lines])
            expected = np.array([phi / k + n * np.pi for n in (-1, 0, 1)])
            expected = expected[(expected >= -2) & (expected <= 2)]
            assert len(lines) == expected.size
            assert np.min(np.abs(xs[:, None] - expected[None, :]), axis=1).max() < 1e-12

    def test_vortex_spokes(self):
        d = ph.decompose(cfield(G, VORTEX))
        phases = [-2.5, -1.0, 0.0, 1.2, np.pi]
        by = ph.cotidal_lines_by_phase(d, phases)
        for phi in phases:
            curves = by[phi]
            assert len(curves) == 1
            pts = curves[0].points
            r = np.hypot(*pts.T)
            ang = np.arctan2(pts[:, 1], pts[:, 0])
            far = r > 0.2
            diff = np.angle(np.exp(1j * (ang[far] - phi)))
            assert np.abs(diff).max() < 0.03
            assert r.min() <= 1.5 * np.hypot(G.hx, G.hy)  # spoke reaches the amphidromic point

    def test_degenerate(self):
        d = ph.decompose(cfield(G, lambda x, y: 1 + 0 * x))
        with pytest.warns(RuntimeWarning):
            assert ph.cotidal_lines(d, [0.0]) == []

    def test_phase_range(self):
        d = ph.decompose(cfield(G, VORTEX))
        with pytest.raises(DomainError):
            ph.cotidal_lines(d, [-np.pi])


class TestStandingWave:
    def test_nodes(self):
        m = ph.StandingWaveModel(1.0, 2.0, np.pi)
        nodes = ph.standing_wave_nodes(m, (0.0, 3.0))
        assert nodes == pytest.approx([0, 1, 2, 3], abs=1e-15)
        assert ph.standing_wave_nodes(m, (0.2, 0.8)) == []
        for t in np.linspace(0, 5, 11):
            assert np.abs(m.evaluate(np.array(nodes), t)).max() <= 1e-15

    def test_validation(self):
        with pytest.raises(DomainError):
            ph.StandingWaveModel(1.0, 0.0, 1.0)

    @given(st.floats(0.1, 10), st.floats(-20, 20), st.floats(0, 20))
    def test_nodes_are_multiples(self, k, lo, span):
        nodes = ph.standing_wave_nodes(ph.StandingWaveModel(1.0, 1.0, k), (lo, lo + span))
        for x in nodes:
            n = x * k / np.pi
            assert abs(n - round(n)) < 1e-9
            assert lo - 1e-9 <= x <= lo + span + 1e-9

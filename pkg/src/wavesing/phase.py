"""Phase singularities of complex scalar waves.

A harmonic wave ``Re{alpha exp(i chi)}`` has a phase ``chi`` that is
undefined at the zeros of its amplitude.  Around such a zero the phase
changes by a multiple of ``2 pi``; in a tidal field the zero is an
amphidromic point and the constant-phase curves (cotidal lines) radiate
from it.  Charges are counted positive for counterclockwise phase
increase, so ``x + iy`` has charge ``+1``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage
from skimage import measure

from .errors import DomainError, IndeterminatePhaseError, LoopResolutionError, NumericalInputError
from .fields import (ComplexField2D, Grid2D, ParametricCurve, ScalarField2D, VectorField2D,
                     winding_aware_phase_difference)

__all__ = [
    "WaveDecomposition",
    "AmphidromicPoint",
    "StandingWaveModel",
    "decompose",
    "current",
    "winding_raw",
    "winding_number",
    "loop_from_polygon",
    "circle_loop",
    "boundary_loop",
    "plaquette_charges",
    "detect_amphidromic",
    "cotidal_lines",
    "cotidal_lines_by_phase",
    "standing_wave_nodes",
    "harmonic_field",
]

THRESHOLD_RTOL = 1e-12
QUANTIZATION_TOL = 0.05
STEP_MAX = 0.9 * np.pi
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class WaveDecomposition:
    """Amplitude ``alpha`` and phase ``chi`` of a complex field.

    ``indeterminate`` marks nodes with ``alpha <= threshold``; ``chi`` is
    stored as zero there.
    """

    alpha: ScalarField2D
    chi: ScalarField2D
    threshold: float
    indeterminate: np.ndarray

    @property
    def grid(self) -> Grid2D:
        return self.alpha.grid

    def reconstruct(self) -> ComplexField2D:
        return ComplexField2D(self.grid, self.alpha.values * np.exp(1j * self.chi.values))


@dataclass(frozen=True)
class AmphidromicPoint:
    position: tuple[float, float]
    charge: int
    amplitude: float
    index: tuple[int, int]


@dataclass(frozen=True)
class StandingWaveModel:
    """``psi = (2 a cos(omega t)) sin(k x)``."""

    a: float
    omega: float
    k: float

    def __post_init__(self):
        if not (self.a > 0 and self.omega > 0 and self.k > 0):
            raise DomainError("standing wave needs a, omega, k > 0")

    def evaluate(self, x, t):
        return 2.0 * self.a * np.cos(self.omega * np.asarray(t)) * np.sin(self.k * np.asarray(x))


def decompose(field: ComplexField2D, alpha_threshold: float | None = None) -> WaveDecomposition:
    """Polar form with the phase in ``(-pi, pi]``.

    The default threshold is ``1e-12 max(alpha)``.
    """
    z = np.asarray(field.values)
    if not np.all(np.isfinite(z)):
        raise NumericalInputError("field must be finite")
    alpha = np.abs(z)
    thr = THRESHOLD_RTOL * float(alpha.max()) if alpha_threshold is None else float(alpha_threshold)
    chi = np.angle(z)
    chi = np.where(chi <= -np.pi, np.pi, chi)
    bad = alpha <= thr
    chi = np.where(bad, 0.0, chi)
    bad = bad.copy()
    bad.setflags(write=False)
    return WaveDecomposition(ScalarField2D(field.grid, alpha), ScalarField2D(field.grid, chi), thr, bad)


def _wrapped_derivative(chi, h, axis):
    c = np.moveaxis(chi, axis, 0)
    w = winding_aware_phase_difference
    out = np.empty_like(c)
    out[1:-1] = w(c[:-2], c[2:]) / (2.0 * h)
    out[0] = (4.0 * w(c[0], c[1]) - w(c[0], c[2])) / (2.0 * h)
    out[-1] = (4.0 * w(c[-2], c[-1]) - w(c[-3], c[-1])) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def current(dec: WaveDecomposition) -> VectorField2D:
    """``j = alpha^2 grad chi`` with phase differences taken modulo ``2 pi``.

    Zero at indeterminate nodes.
    """
    g = dec.grid
    if g.nx < 3 or g.ny < 3:
        raise DomainError("current needs at least 3 nodes per axis")
    chi = dec.chi.values
    a2 = dec.alpha.values**2
    jx = np.where(dec.indeterminate, 0.0, a2 * _wrapped_derivative(chi, g.hx, 1))
    jy = np.where(dec.indeterminate, 0.0, a2 * _wrapped_derivative(chi, g.hy, 0))
    return VectorField2D(g, jx, jy)


def _loop_indices(dec, loop):
    idx = np.asarray(loop, dtype=int)
    if idx.ndim != 2 or idx.shape[1] != 2 or idx.shape[0] < 3:
        raise NumericalInputError("loop must be a sequence of at least 3 (row, col) nodes")
    ny, nx = dec.grid.shape
    if np.any(idx < 0) or np.any(idx[:, 0] >= ny) or np.any(idx[:, 1] >= nx):
        raise DomainError("loop node outside the grid")
    if np.any(np.abs(np.diff(np.vstack([idx, idx[:1]]), axis=0)).max(axis=1) > 1):
        raise NumericalInputError("consecutive loop nodes must be grid neighbours")
    return idx


def winding_raw(dec: WaveDecomposition, loop) -> float:
    """Total phase change around a closed loop of grid nodes, over ``2 pi``.

    ``loop`` lists ``(row, col)`` pairs; the closing edge back to the first
    node is implied (a repeated final node is allowed).  Consecutive nodes
    must be 8-neighbours.
    """
    idx = _loop_indices(dec, loop)
    if np.any(dec.indeterminate[idx[:, 0], idx[:, 1]]):
        raise IndeterminatePhaseError("loop passes through a node where the phase is undefined")
    chi = dec.chi.values[idx[:, 0], idx[:, 1]]
    d = winding_aware_phase_difference(chi, np.roll(chi, -1))
    if np.any(np.abs(d) > STEP_MAX):
        # a jump near pi has no reliable sign: the loop undersamples the phase
        raise LoopResolutionError(f"phase step {np.abs(d).max():.3f} rad between loop nodes is ambiguous; "
                                  "refine the loop")
    return float(np.sum(d)) / TWO_PI


def winding_number(dec: WaveDecomposition, loop) -> int:
    """Integer charge enclosed by ``loop`` (counterclockwise positive).

    Raises
    ------
    IndeterminatePhaseError
        The loop touches a node with undefined phase.
    LoopResolutionError
        The raw sum is more than 0.05 from an integer.
    """
    raw = winding_raw(dec, loop)
    n = round(raw)
    if abs(raw - n) > QUANTIZATION_TOL:
        raise LoopResolutionError(f"winding sum {raw:.4f} is not near an integer; refine the loop")
    return int(n)


def loop_from_polygon(grid: Grid2D, points) -> np.ndarray:
    """Grid-node loop following a closed polygon given in physical coordinates.

    Each edge is sampled finely and snapped to the nearest node;
    consecutive duplicates are removed.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 3:
        raise NumericalInputError("polygon needs at least 3 (x, y) vertices")
    q = np.vstack([p, p[:1]])
    h = min(grid.hx, grid.hy)
    pieces = []
    for a, b in zip(q[:-1], q[1:]):
        n = max(2, int(np.ceil(np.hypot(*(b - a)) / (0.25 * h))) + 1)
        s = np.linspace(0.0, 1.0, n)[:-1, None]
        pieces.append(a + s * (b - a))
    pts = np.vstack(pieces)
    col = np.rint((pts[:, 0] - grid.x_min) / grid.hx).astype(int)
    row = np.rint((pts[:, 1] - grid.y_min) / grid.hy).astype(int)
    if np.any(col < 0) or np.any(col >= grid.nx) or np.any(row < 0) or np.any(row >= grid.ny):
        raise DomainError("polygon leaves the grid")
    idx = np.stack([row, col], axis=1)
    keep = np.any(idx != np.roll(idx, 1, axis=0), axis=1)
    if not keep.any():
        raise NumericalInputError("polygon collapses to one node")
    return idx[keep]


def circle_loop(grid: Grid2D, center, radius: float, n: int | None = None) -> np.ndarray:
    """Counterclockwise node loop approximating a circle."""
    if n is None:
        n = max(16, int(np.ceil(TWO_PI * radius / min(grid.hx, grid.hy))))
    th = np.linspace(0.0, TWO_PI, n, endpoint=False)
    return loop_from_polygon(grid, np.c_[center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)])


def boundary_loop(grid: Grid2D) -> np.ndarray:
    """Counterclockwise loop through every boundary node."""
    ny, nx = grid.shape
    bottom = [(0, c) for c in range(nx)]
    right = [(r, nx - 1) for r in range(1, ny)]
    top = [(ny - 1, c) for c in range(nx - 2, -1, -1)]
    left = [(r, 0) for r in range(ny - 2, 0, -1)]
    return np.array(bottom + right + top + left, dtype=int)


def _plaquette_steps(chi):
    w = winding_aware_phase_difference
    a, b = chi[:-1, :-1], chi[:-1, 1:]
    c, d = chi[1:, 1:], chi[1:, :-1]
    return np.stack([w(a, b), w(b, c), w(c, d), w(d, a)])


def plaquette_charges(dec: WaveDecomposition) -> np.ndarray:
    """Winding of every grid cell, counterclockwise, shape ``(ny-1, nx-1)``.

    Cells with a corner of undefined phase are given zero here; the charge
    sitting on such a node is measured separately by
    :func:`detect_amphidromic`.
    """
    steps = _plaquette_steps(dec.chi.values)
    q = np.rint(steps.sum(axis=0) / TWO_PI).astype(int)
    q[_touching_cells(dec.indeterminate)] = 0
    return q


def _touching_cells(bad):
    return bad[:-1, :-1] | bad[:-1, 1:] | bad[1:, 1:] | bad[1:, :-1]


def _rect_ring(r0, r1, c0, c1):
    # counterclockwise node ring on the rectangle [r0, r1] x [c0, c1]
    bottom = [(r0, c) for c in range(c0, c1 + 1)]
    right = [(r, c1) for r in range(r0 + 1, r1 + 1)]
    top = [(r1, c) for c in range(c1 - 1, c0 - 1, -1)]
    left = [(r, c0) for r in range(r1 - 1, r0, -1)]
    return bottom + right + top + left


def _ring_charge(dec, labels, lab):
    """Winding on the node ring one node outside the cluster, or None if unusable."""
    rows, cols = np.nonzero(labels == lab)
    r0, r1 = rows.min() - 1, rows.max() + 2
    c0, c1 = cols.min() - 1, cols.max() + 2
    ny, nx = dec.grid.shape
    if r0 < 0 or c0 < 0 or r1 >= ny or c1 >= nx:
        return None
    inside = labels[r0:r1, c0:c1]
    if np.any((inside != 0) & (inside != lab)):
        return None
    try:
        return winding_number(dec, _rect_ring(r0, r1, c0, c1))
    except (IndeterminatePhaseError, LoopResolutionError):
        return None


def _node_charges(dec):
    # winding around the 8-node ring of each indeterminate node
    out = {}
    ny, nx = dec.grid.shape
    for r, c in zip(*np.nonzero(dec.indeterminate)):
        if r in (0, ny - 1) or c in (0, nx - 1):
            continue
        ring = [(r - 1, c - 1), (r - 1, c), (r - 1, c + 1), (r, c + 1),
                (r + 1, c + 1), (r + 1, c), (r + 1, c - 1), (r, c - 1)]
        try:
            out[(int(r), int(c))] = winding_number(dec, ring)
        except (IndeterminatePhaseError, LoopResolutionError):
            out[(int(r), int(c))] = 0
    return out


def detect_amphidromic(dec: WaveDecomposition) -> list[AmphidromicPoint]:
    """Locate phase singularities and their charges.

    Cells with nonzero winding, cells with a phase step too close to
    ``pi`` to have a reliable sign, and cells around nodes of undefined
    phase are grouped into 8-connected clusters.  A cluster's charge is
    the winding on the node ring one node outside its bounding box; when
    that ring leaves the grid, meets another cluster or is itself
    unusable, the enclosed cell and node charges are summed instead.
    Each cluster with nonzero net charge gives one point, placed at the
    node of smallest amplitude among the cluster's corners.
    """
    steps = _plaquette_steps(dec.chi.values)
    q = plaquette_charges(dec)
    node_q = _node_charges(dec)
    touch = _touching_cells(dec.indeterminate)
    mask = (q != 0) | touch | (np.abs(steps).max(axis=0) > STEP_MAX)
    labels, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        return []
    alpha = dec.alpha.values
    X, Y = dec.grid.mesh()
    charges = ndimage.sum_labels(q, labels, index=np.arange(1, n + 1)).astype(int)
    for (r, c), val in node_q.items():
        # any cell touching the node carries its label
        lab = labels[max(r - 1, 0):r + 1, max(c - 1, 0):c + 1].max()
        if lab:
            charges[lab - 1] += val
    points = []
    for lab in range(1, n + 1):
        ring = _ring_charge(dec, labels, lab)
        charge = int(charges[lab - 1]) if ring is None else ring
        if charge == 0:
            continue
        cells = labels == lab
        corner = np.zeros(alpha.shape, dtype=bool)
        corner[:-1, :-1] |= cells
        corner[:-1, 1:] |= cells
        corner[1:, :-1] |= cells
        corner[1:, 1:] |= cells
        flat = np.where(corner, alpha, np.inf)
        r, c = np.unravel_index(int(np.argmin(flat)), flat.shape)
        points.append(AmphidromicPoint((float(X[r, c]), float(Y[r, c])), charge,
                                       float(alpha[r, c]), (int(r), int(c))))
    points.sort(key=lambda p: (p.position[1], p.position[0]))
    return points


def _runs(mask):
    # maximal runs of True as (start, stop) pairs
    m = np.concatenate([[False], mask, [False]]).astype(int)
    d = np.diff(m)
    return list(zip(np.nonzero(d == 1)[0], np.nonzero(d == -1)[0]))


def _as_curve(pts):
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    keep = np.concatenate([[True], seg > 0])
    pts = pts[keep]
    if pts.shape[0] == 2:
        pts = np.vstack([pts[0], pts.mean(axis=0), pts[1]])
    if pts.shape[0] < 3:
        return None
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    return ParametricCurve(s, pts)


def cotidal_lines_by_phase(dec: WaveDecomposition, phases: Sequence[float]) -> dict[float, list[ParametricCurve]]:
    """Cotidal lines grouped by phase.

    The level set ``chi = phi`` is the zero set of ``sin(chi - phi)`` on the
    side where ``cos(chi - phi) > 0``.  Both functions are continuous
    across the ``+/- pi`` branch cut, so marching squares on the sine never
    follows the cut.
    """
    g = dec.grid
    chi = dec.chi.values
    out: dict[float, list[ParametricCurve]] = {}
    for phi in phases:
        phi = float(phi)
        if not -np.pi < phi <= np.pi:
            raise DomainError("phases must lie in (-pi, pi]")
        sn = np.sin(chi - phi)
        cs = np.cos(chi - phi)
        sn[dec.indeterminate] = 0.0
        cs[dec.indeterminate] = 0.0
        if np.ptp(sn) == 0.0:
            warnings.warn(f"cotidal level set for phase {phi} is degenerate (constant field)",
                          RuntimeWarning, stacklevel=2)
            out[phi] = []
            continue
        curves = []
        for c in measure.find_contours(sn, 0.0):
            side = ndimage.map_coordinates(cs, c.T, order=1, mode="nearest") > 0
            for a, b in _runs(side):
                rc = c[a:b]
                pts = np.c_[g.x_min + rc[:, 1] * g.hx, g.y_min + rc[:, 0] * g.hy]
                curve = _as_curve(pts)
                if curve is not None:
                    curves.append(curve)
        out[phi] = curves
    return out


def cotidal_lines(dec: WaveDecomposition, phases: Sequence[float]) -> list[ParametricCurve]:
    """Curves of constant phase for each requested phase, concatenated in order."""
    return [c for curves in cotidal_lines_by_phase(dec, phases).values() for c in curves]


def standing_wave_nodes(model: StandingWaveModel, x_range) -> list[float]:
    """All ``x = n pi / k`` in the closed interval ``x_range``."""
    lo, hi = x_range
    if lo > hi:
        raise DomainError("x_range must satisfy lo <= hi")
    step = np.pi / model.k
    slack = 1e-12
    n0 = int(np.ceil(lo / step - slack))
    n1 = int(np.floor(hi / step + slack))
    return [n * step for n in range(n0, n1 + 1)]


def _spatial(model: dict, X, Y):
    kind = model.get("type")
    if kind == "plane":
        kx, ky = model.get("k", [0.0, 0.0])
        return np.exp(1j * (kx * X + ky * Y))
    if kind == "vortex":
        x0, y0 = model.get("center", [0.0, 0.0])
        charge = int(model.get("charge", 1))
        if charge == 0:
            raise DomainError("vortex charge must be nonzero")
        z = (X - x0) + 1j * np.sign(charge) * (Y - y0)
        width = model.get("width")
        env = 1.0 if width is None else np.exp(-((X - x0) ** 2 + (Y - y0) ** 2) / (2.0 * width**2))
        return z ** abs(charge) * env
    if kind == "uniform":
        return np.ones_like(X, dtype=complex)
    raise DomainError(f"unknown spatial model {kind!r}")


def harmonic_field(grid: Grid2D, constituents: Sequence[dict]) -> ComplexField2D:
    """Complex tidal field ``sum A exp(-i g) S(x, y)`` from harmonic constants.

    Each constituent has ``amplitude`` ``A``, ``phase_lag`` ``g`` in radians
    and a ``spatial`` model: ``{"type": "plane", "k": [kx, ky]}``,
    ``{"type": "vortex", "center": [x0, y0], "charge": +/-n, "width": w}``
    or ``{"type": "uniform"}``.
    """
    if not constituents:
        raise NumericalInputError("need at least one constituent")
    X, Y = grid.mesh()
    total = np.zeros(grid.shape, dtype=complex)
    for c in constituents:
        A = float(c["amplitude"])
        if A < 0:
            raise DomainError("constituent amplitude must be non-negative")
        total += A * np.exp(-1j * float(c.get("phase_lag", 0.0))) * _spatial(c.get("spatial", {"type": "uniform"}), X, Y)
    return ComplexField2D(grid, total)

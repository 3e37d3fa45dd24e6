"""Planar ray tracing, the ray map, and caustic detection.

Rays obey the canonical system ``dr/dtau = p``, ``dp/dtau = grad(n^2)/2``
with ``p = grad(psi)`` and ``dtau = ds / n``, so that ``|p|^2 = n^2`` is
conserved and ``dpsi/dtau = |p|^2``.  A family of rays launched from a
curve defines the map ``(xi, tau) -> r``; caustics are the points where its
derivative matrix loses rank.  Smooth plane-to-plane maps have two stable
singularity types, folds and cusps, told apart here with the Whitney
criterion.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.interpolate import RectBivariateSpline
from scipy.spatial import cKDTree

from .errors import (
    AmplitudeZeroError,
    DomainError,
    NumericalInputError,
    RankError,
    RayExitError,
    StepRejectionError,
)
from .fields import Grid2D, ScalarField2D, gradient, laplacian

__all__ = [
    "MediumSpec",
    "CircularMirror",
    "RayState",
    "RayFan",
    "CausticType",
    "CausticPoint",
    "trace_ray",
    "trace_fan",
    "derivative_map",
    "classify_singularity",
    "find_singular_point",
    "detect_caustic",
    "eikonal_residual",
    "transport_residual",
    "phase_from_fan",
    "parallel_launch",
    "converging_launch",
]

RANK_RTOL = 1e-8


# --------------------------------------------------------------------------
# media and mirrors

@dataclass(frozen=True)
class MediumSpec:
    """Isotropic medium given by ``n^2(x, y)`` and its gradient.

    Both callables take broadcastable arrays ``x, y``; ``grad_n2`` returns
    the pair ``(d/dx, d/dy)``.  ``bounds`` optionally restricts the traced
    domain to ``(x_min, x_max, y_min, y_max)``.
    """

    n2: Callable
    grad_n2: Callable
    k: float = 1.0
    omega0: float | None = None
    bounds: tuple | None = None
    name: str = "custom"

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError("wave number k must be positive")

    def index(self, x, y):
        return np.sqrt(self.n2(x, y))

    def inside(self, x, y):
        if self.bounds is None:
            return np.ones(np.shape(x), dtype=bool)
        x0, x1, y0, y1 = self.bounds
        return (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)

    @classmethod
    def homogeneous(cls, n: float = 1.0, **kw) -> "MediumSpec":
        n2 = float(n) ** 2
        return cls(lambda x, y: np.full(np.broadcast(x, y).shape, n2),
                   lambda x, y: (np.zeros(np.broadcast(x, y).shape), np.zeros(np.broadcast(x, y).shape)),
                   name="homogeneous", **kw)

    @classmethod
    def linear(cls, a: float, b: float = 0.0, n0_sq: float = 1.0, **kw) -> "MediumSpec":
        """``n^2 = n0_sq + b x + a y``."""
        return cls(lambda x, y: n0_sq + b * np.asarray(x) + a * np.asarray(y),
                   lambda x, y: (np.full(np.broadcast(x, y).shape, float(b)),
                                 np.full(np.broadcast(x, y).shape, float(a))),
                   name="linear", **kw)

    @classmethod
    def from_sampled(cls, n2_field: ScalarField2D, **kw) -> "MediumSpec":
        """Medium interpolated from a sampled ``n^2`` with a bicubic spline."""
        g = n2_field.grid
        spl = RectBivariateSpline(g.y, g.x, n2_field.values, kx=3, ky=3)
        bounds = kw.pop("bounds", (g.x_min, g.x_max, g.y_min, g.y_max))

        def n2(x, y):
            return spl.ev(y, x)

        def grad(x, y):
            return spl.ev(y, x, dy=1), spl.ev(y, x, dx=1)

        return cls(n2, grad, bounds=bounds, name="sampled", **kw)


@dataclass(frozen=True)
class CircularMirror:
    """Specular circle; rays reflect when they cross it, at most ``max_bounces`` times."""

    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    max_bounces: int = 1

    def level(self, x, y):
        return np.hypot(x - self.center[0], y - self.center[1]) - self.radius

    def normal(self, x, y):
        dx, dy = x - self.center[0], y - self.center[1]
        r = np.hypot(dx, dy)
        return dx / r, dy / r


# --------------------------------------------------------------------------
# tracing

@dataclass(frozen=True)
class RayState:
    r: tuple
    p: tuple
    psi: float = 0.0
    tau: float = 0.0


def _rhs(medium, x, y, px, py):
    gx, gy = medium.grad_n2(x, y)
    return px, py, 0.5 * gx, 0.5 * gy, px * px + py * py


def _rk4(medium, s, h):
    """One classical fourth-order step on the state tuple (x, y, px, py, psi)."""
    x, y, px, py, psi = s
    k1 = _rhs(medium, x, y, px, py)
    k2 = _rhs(medium, x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], px + 0.5 * h * k1[2], py + 0.5 * h * k1[3])
    k3 = _rhs(medium, x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], px + 0.5 * h * k2[2], py + 0.5 * h * k2[3])
    k4 = _rhs(medium, x + h * k3[0], y + h * k3[1], px + h * k3[2], py + h * k3[3])
    return tuple(si + h / 6.0 * (a + 2 * b + 2 * c + d) for si, a, b, c, d in zip(s, k1, k2, k3, k4))


def _finite(s):
    out = np.ones(np.shape(s[0]), dtype=bool)
    for c in s:
        out &= np.isfinite(c)
    return out


def _safe_step(medium, s, h, max_subdivisions):
    """RK4 over ``h``, halving into substeps while the result is not finite."""
    for level in range(max_subdivisions + 1):
        nsub = 2**level
        cur = s
        for _ in range(nsub):
            cur = _rk4(medium, cur, h / nsub)
        if np.all(_finite(cur)):
            return cur
    raise StepRejectionError(f"step rejected after {max_subdivisions} subdivisions")


def _reflect(mirror, s, mask, frac_step, medium, h, bounces):
    """Advance rays in ``mask`` to the mirror, reflect, and finish the step."""
    lo = np.zeros(mask.sum())
    hi = np.ones(mask.sum())
    sub = tuple(c[mask] for c in s)
    lev0 = mirror.level(sub[0], sub[1])
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        m = _rk4(medium, sub, mid * h)
        same = np.sign(mirror.level(m[0], m[1])) == np.sign(lev0)
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    tc = 0.5 * (lo + hi)
    hit = _rk4(medium, sub, tc * h)
    nx, ny = mirror.normal(hit[0], hit[1])
    dot = hit[2] * nx + hit[3] * ny
    refl = (hit[0], hit[1], hit[2] - 2 * dot * nx, hit[3] - 2 * dot * ny, hit[4])
    rest = _rk4(medium, refl, (1.0 - tc) * h)
    out = [c.copy() for c in frac_step]
    for i in range(5):
        out[i][mask] = rest[i]
    bounces = bounces.copy()
    bounces[mask] += 1
    return tuple(out), bounces


def _integrate(medium, x, y, px, py, tau_max, dtau, mirror, max_subdivisions):
    x, y, px, py = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (x, y, px, py))
    n2 = medium.n2(x, y)
    if np.any(n2 <= 0):
        raise DomainError("refractive index must be positive at the launch points")
    if np.any(np.abs(np.hypot(px, py) - np.sqrt(n2)) > 1e-10):
        raise DomainError("launch momentum violates |p| = n(r)")
    nsteps = int(np.ceil(tau_max / dtau - 1e-9))
    taus = np.linspace(0.0, nsteps * dtau, nsteps + 1)
    h = dtau
    N = x.size
    out = np.empty((5, N, nsteps + 1))
    bounces = np.zeros((N, nsteps + 1), dtype=np.int64)
    s = (x, y, px, py, np.zeros(N))
    b = np.zeros(N, dtype=np.int64)
    for i, c in enumerate(s):
        out[i, :, 0] = c
    for k in range(1, nsteps + 1):
        new = _safe_step(medium, s, h, max_subdivisions)
        if mirror is not None:
            crossed = (np.sign(mirror.level(new[0], new[1])) != np.sign(mirror.level(s[0], s[1]))) \
                & (b < mirror.max_bounces)
            if crossed.any():
                new, b = _reflect(mirror, s, crossed, new, medium, h, b)
        if medium.bounds is not None and not np.all(medium.inside(new[0], new[1])):
            raise RayExitError(f"ray left the traced domain at tau = {taus[k]:.6g}")
        s = new
        for i, c in enumerate(s):
            out[i, :, k] = c
        bounces[:, k] = b
    return taus, out, bounces


def trace_ray(start: RayState, medium: MediumSpec, tau_max: float, dtau: float,
              mirror: CircularMirror | None = None, max_subdivisions: int = 8):
    """Integrate one ray with classical RK4.

    Returns a dict of arrays ``tau, x, y, px, py, psi, bounces`` sampled on
    the uniform ``tau`` lattice (``psi`` accumulated from ``start.psi``).
    """
    taus, out, bounces = _integrate(medium, start.r[0], start.r[1], start.p[0], start.p[1],
                                    tau_max, dtau, mirror, max_subdivisions)
    return {
        "tau": start.tau + taus,
        "x": out[0, 0], "y": out[1, 0],
        "px": out[2, 0], "py": out[3, 0],
        "psi": start.psi + out[4, 0],
        "bounces": bounces[0],
    }


@dataclass(frozen=True, eq=False)
class RayFan:
    """Rays indexed by launch parameter ``xi`` on a common ``tau`` lattice.

    Arrays ``r`` and ``p`` have shape ``(n_xi, n_tau, 2)``; ``psi`` and
    ``bounces`` have shape ``(n_xi, n_tau)``.
    """

    xi: np.ndarray
    tau: np.ndarray
    r: np.ndarray
    p: np.ndarray
    psi: np.ndarray
    bounces: np.ndarray
    medium: MediumSpec = field(repr=False, default=None)


def parallel_launch(xi, direction=(0.0, -1.0), offset=0.0, n: float = 1.0):
    """Launch points ``(xi, offset)`` rotated into a line normal to ``direction``."""
    xi = np.asarray(xi, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    t = np.array([-d[1], d[0]])
    if t[0] < 0 or (t[0] == 0 and t[1] < 0):
        t = -t
    pos = xi[:, None] * t[None, :] + offset * d[None, :]
    return pos, np.broadcast_to(n * d, pos.shape).copy()


def converging_launch(xi, focus, n: float = 1.0):
    """Launch from ``(xi, 0)`` with momenta aimed at ``focus``."""
    xi = np.asarray(xi, dtype=float)
    pos = np.column_stack([xi, np.zeros_like(xi)])
    d = np.asarray(focus, dtype=float)[None, :] - pos
    d /= np.linalg.norm(d, axis=1)[:, None]
    return pos, n * d


def trace_fan(xi, positions, momenta, medium: MediumSpec, tau_max: float, dtau: float,
              mirror: CircularMirror | None = None, max_subdivisions: int = 8) -> RayFan:
    """Trace all rays of a fan together (vectorised over ``xi``)."""
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 1 or np.any(np.diff(xi) <= 0):
        raise DomainError("launch parameter must be strictly increasing")
    positions = np.asarray(positions, dtype=float)
    momenta = np.asarray(momenta, dtype=float)
    taus, out, bounces = _integrate(medium, positions[:, 0], positions[:, 1], momenta[:, 0], momenta[:, 1],
                                    tau_max, dtau, mirror, max_subdivisions)
    r = np.stack([out[0], out[1]], axis=-1)
    p = np.stack([out[2], out[3]], axis=-1)
    return RayFan(xi, taus, r, p, out[4], bounces, medium)


# --------------------------------------------------------------------------
# derivative map and Whitney classification

_D1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_O1 = np.array([-2.0, -1.0, 1.0, 2.0])


def _eval(f, x, y):
    out = np.asarray(f(x, y), dtype=float)
    if out.shape[0] != 2 or not np.all(np.isfinite(out)):
        raise NumericalInputError("map returned non-finite values")
    return out


def _jacobian(f, x, y, h):
    """Fourth-order central-difference Jacobian of ``f: R^2 -> R^2``."""
    cx = sum(w * _eval(f, x + o * h, y) for w, o in zip(_D1, _O1)) / h
    cy = sum(w * _eval(f, x, y + o * h) for w, o in zip(_D1, _O1)) / h
    return np.stack([cx, cy], axis=-1)


def _rank(D):
    s = np.linalg.svd(D, compute_uv=False)
    if s[0] == 0:
        return 0
    return 2 if s[1] / s[0] > RANK_RTOL else 1


def derivative_map(f, point, step: float | None = None):
    """Derivative matrix of ``f`` at ``point`` and its numerical rank.

    Rank 1 is reported when the singular-value ratio is at most ``1e-8``.
    The default step is ``1e-3`` scaled by ``max(1, |point|)``; the stencil
    is fourth order, so cubic maps are differentiated to rounding error.
    """
    x, y = map(float, point)
    if step is None:
        step = 1e-3 * max(1.0, abs(x), abs(y))
    D = _jacobian(f, x, y, step)
    if not np.all(np.isfinite(D)):
        raise NumericalInputError("non-finite derivative")
    return D, _rank(D)


class CausticType(enum.Enum):
    FOLD = "fold"
    CUSP = "cusp"
    DEGENERATE = "degenerate"


def classify_singularity(f, point, step: float | None = None, tol: float = 1e-6) -> CausticType:
    """Whitney type of a corank-one singular point of a plane map.

    With ``g = det Df`` and ``k`` a smooth field spanning the kernel of
    ``Df`` near the singular set, the point is a fold when ``dg(k) != 0``
    (the kernel crosses the singular curve), a cusp when ``dg(k) = 0`` but
    ``h = dg(k)`` has a simple zero along the curve, i.e. ``dg ^ dh != 0``,
    and degenerate otherwise.  Every derivative is a nested fourth-order
    central difference with step ``1e-3 * max(1, |point|)``.
    """
    x0, y0 = map(float, point)
    scale = max(1.0, abs(x0), abs(y0))
    if step is None:
        step = 1e-3 * scale
    D0, rank = derivative_map(f, (x0, y0), step)
    if rank != 1:
        raise RankError(f"Df has rank {rank} at {point}; expected 1")
    row = int(np.argmax(np.linalg.norm(D0, axis=1)))

    def det(x, y):
        D = _jacobian(f, x, y, step)
        return D[..., 0, 0] * D[..., 1, 1] - D[..., 0, 1] * D[..., 1, 0]

    def grad_det(x, y):
        gx = sum(w * det(x + o * step, y) for w, o in zip(_D1, _O1)) / step
        gy = sum(w * det(x, y + o * step) for w, o in zip(_D1, _O1)) / step
        return gx, gy

    def kernel_slope(x, y):
        D = _jacobian(f, x, y, step)
        a, b = D[..., row, 0], D[..., row, 1]
        gx, gy = grad_det(x, y)
        return gx * (-b) + gy * a

    def grad_h(x, y):
        hx = sum(w * kernel_slope(x + o * step, y) for w, o in zip(_D1, _O1)) / step
        hy = sum(w * kernel_slope(x, y + o * step) for w, o in zip(_D1, _O1)) / step
        return hx, hy

    a, b = D0[row]
    knorm = np.hypot(a, b)
    gx, gy = grad_det(x0, y0)
    gnorm = np.hypot(gx, gy)
    if gnorm <= tol * knorm:
        return CausticType.DEGENERATE
    h0 = (gx * (-b) + gy * a) / (gnorm * knorm)
    if abs(h0) > tol:
        return CausticType.FOLD
    hx, hy = grad_h(x0, y0)
    cross = (gx * hy - gy * hx) / (gnorm * knorm)
    if abs(cross) > tol:
        return CausticType.CUSP
    return CausticType.DEGENERATE


def find_singular_point(f, start, direction, span: float, step: float | None = None, xtol: float = 1e-14):
    """Zero of ``det Df`` on the segment ``start + s * direction``, ``|s| <= span``."""
    p0 = np.asarray(start, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)

    def g(s):
        D, _ = derivative_map(f, p0 + s * d, step)
        return np.linalg.det(D)

    return p0 + optimize.brentq(g, -span, span, xtol=xtol, rtol=4 * np.finfo(float).eps) * d


# --------------------------------------------------------------------------
# caustic detection on a fan

@dataclass(frozen=True)
class CausticPoint:
    position: tuple
    type: CausticType
    rank: int
    abs_det: float
    xi: float = np.nan
    tau: float = np.nan
    ray: int = -1


def _hermite(r0, r1, p0, p1, h, s):
    """Cubic Hermite interpolation of positions on ``[0, h]`` at fraction ``s``."""
    s = s[..., None]
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    r = h00 * r0 + h10 * h * p0 + h01 * r1 + h11 * h * p1
    d00 = (6 * s**2 - 6 * s) / h
    d10 = 3 * s**2 - 4 * s + 1
    d01 = (-6 * s**2 + 6 * s) / h
    d11 = 3 * s**2 - 2 * s
    dr = d00 * r0 + d10 * p0 + d01 * r1 + d11 * p1
    return r, dr


# fourth-order first-derivative stencils on a uniform lattice, by position in the fan
_UNIFORM_STENCILS = {
    "first": ((0, 1, 2, 3, 4), (-25.0, 48.0, -36.0, 16.0, -3.0)),
    "second": ((-1, 0, 1, 2, 3), (-3.0, -10.0, 18.0, -6.0, 1.0)),
    "centre": ((-2, -1, 0, 1, 2), (1.0, -8.0, 0.0, 8.0, -1.0)),
    "penultimate": ((-3, -2, -1, 0, 1), (-1.0, 6.0, -18.0, 10.0, 3.0)),
    "last": ((-4, -3, -2, -1, 0), (3.0, -16.0, 36.0, -48.0, 25.0)),
}


def _xi_stencils(xi):
    """Per-ray offsets and weights for d/dxi, shape ``(n, m)``.

    Fourth order (one-sided at the two outermost rays of each side) on a
    uniform launch lattice with at least 5 rays; otherwise three-point
    weights exact for quadratics on the actual spacing.
    """
    n = xi.size
    d = np.diff(xi)
    if n >= 5 and np.allclose(d, d[0], rtol=1e-9, atol=0):
        rows = ["first", "second"] + ["centre"] * (n - 4) + ["penultimate", "last"]
        offs = np.array([_UNIFORM_STENCILS[k][0] for k in rows])
        wts = np.array([_UNIFORM_STENCILS[k][1] for k in rows]) / (12.0 * d[0])
        return offs, wts
    offs = np.tile(np.array([-1, 0, 1]), (n, 1))
    offs[0] += 1
    offs[-1] -= 1
    wts = np.empty((n, 3))
    for j in range(n):
        h = xi[j + offs[j]] - xi[j]
        # rows: exact for 1, x, x^2
        wts[j] = np.linalg.solve(np.vstack([np.ones(3), h, h * h]), [0.0, 1.0, 0.0])
    return offs, wts


def detect_caustic(fan: RayFan, det_tol: float = 1e-10, classify_tol: float = 1e-5) -> list[CausticPoint]:
    """Caustic points of the ray map ``(xi, tau) -> r``.

    ``det Df = r_xi x p`` is evaluated on the lattice with finite
    differences across neighbouring rays (fourth order when the launch
    parameter is uniformly spaced, one-sided at the edges of the fan).  Sign changes along ``tau`` are refined
    by bisection on the cubic Hermite interpolant of the rays in the
    stencil.  Cells in which any ray of the stencil bounced are skipped,
    since a mirror reverses orientation without a caustic.

    Each point is then typed from the singular curve ``tau = tau_c(xi)`` in
    parameter space: at a caustic ``r_xi = lam p`` and the kernel of ``Df``
    is ``(1, -lam)``.  The kernel is tangent to the curve where
    ``s = tau_c' + lam`` vanishes; a sign change of ``s`` between
    neighbouring rays marks a cusp, ``s`` vanishing on an arc marks a
    degenerate point (such as a perfect focus), anything else is a fold.
    """
    xi, tau, r, p, b = fan.xi, fan.tau, fan.r, fan.p, fan.bounces
    n = xi.size
    if n < 3:
        return []
    offs, wts = _xi_stencils(xi)
    members = np.arange(n)[:, None] + offs

    def r_xi_of(rs, rays):
        # rs[m]: positions of stencil member m for each entry of rays
        return sum(wts[rays, m][:, None] * rs[m] for m in range(offs.shape[1]))

    rx_lat = np.einsum("nm,nmtk->ntk", wts, r[members])
    det = rx_lat[..., 0] * p[..., 1] - rx_lat[..., 1] * p[..., 0]
    same = np.all(b[members] == b[:, None, :], axis=1)
    valid = same[:, :-1] & same[:, 1:] & (b[:, :-1] == b[:, 1:])
    d0, d1 = det[:, :-1], det[:, 1:]
    flips = valid & (((d0 < 0) & (d1 > 0)) | ((d0 > 0) & (d1 < 0)) | ((d0 == 0) & (d1 != 0)))
    ray, kk = np.nonzero(flips)
    if ray.size == 0:
        return []
    h = tau[kk + 1] - tau[kk]

    def interp(j, s):
        return _hermite(r[j, kk], r[j, kk + 1], p[j, kk], p[j, kk + 1], h[:, None], s)

    def det_at(s):
        rx = r_xi_of([interp(members[ray, m], s)[0] for m in range(offs.shape[1])], ray)
        _, pm = interp(ray, s)
        return rx[:, 0] * pm[:, 1] - rx[:, 1] * pm[:, 0], rx, pm

    lo = np.zeros(ray.size)
    hi = np.ones(ray.size)
    flo = d0[ray, kk]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm, _, _ = det_at(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    s = 0.5 * (lo + hi)
    dval, rx, pm = det_at(s)
    pos, _ = interp(ray, s)
    tau_c = tau[kk] + s * h
    lam = np.einsum("ij,ij->i", rx, pm) / np.einsum("ij,ij->i", pm, pm)

    # differencing neighbouring rays loses digits: allow for the rounding floor
    rmag = np.abs(r[ray, kk]).max(axis=1) + 1.0
    floor = 16.0 * np.finfo(float).eps * rmag * np.abs(wts[ray]).sum(axis=1) * np.linalg.norm(pm, axis=1)
    keep = np.abs(dval) <= np.maximum(det_tol, floor)
    order = np.lexsort((tau_c, ray))
    ray, tau_c, lam, pos, dval, keep = (a[order] for a in (ray, tau_c, lam, pos, dval, keep))

    types = _type_points(xi, ray, tau_c, lam, classify_tol)
    out = []
    for j in range(ray.size):
        if not keep[j]:
            continue
        out.append(CausticPoint((float(pos[j, 0]), float(pos[j, 1])), types[j], 1, float(abs(dval[j])),
                                float(xi[ray[j]]), float(tau_c[j]), int(ray[j])))
    return out


def _type_points(xi, ray, tau_c, lam, tol):
    n = ray.size
    slope = np.full(n, np.nan)
    nb_prev = np.full(n, -1)
    nb_next = np.full(n, -1)
    # link each point to the point on the neighbouring ray closest in tau
    by_ray: dict[int, list[int]] = {}
    for j, rj in enumerate(ray):
        by_ray.setdefault(int(rj), []).append(j)
    for j in range(n):
        for off, store in ((-1, nb_prev), (1, nb_next)):
            cand = by_ray.get(int(ray[j]) + off)
            if cand:
                c = min(cand, key=lambda q: abs(tau_c[q] - tau_c[j]))
                store[j] = c
    for j in range(n):
        a, c = nb_prev[j], nb_next[j]
        if a >= 0 and c >= 0:
            slope[j] = (tau_c[c] - tau_c[a]) / (xi[ray[c]] - xi[ray[a]])
        elif c >= 0:
            slope[j] = (tau_c[c] - tau_c[j]) / (xi[ray[c]] - xi[ray[j]])
        elif a >= 0:
            slope[j] = (tau_c[j] - tau_c[a]) / (xi[ray[j]] - xi[ray[a]])
    s = slope + lam
    mag = 1.0 + np.abs(slope) + np.abs(lam)
    small = np.abs(s) <= tol * mag
    types = [CausticType.FOLD] * n
    for j in range(n):
        if np.isnan(s[j]):
            types[j] = CausticType.DEGENERATE
            continue
        a, c = nb_prev[j], nb_next[j]
        if small[j] and a >= 0 and c >= 0 and small[a] and small[c]:
            types[j] = CausticType.DEGENERATE
    for j in range(n):
        c = nb_next[j]
        if c < 0 or np.isnan(s[j]) or np.isnan(s[c]):
            continue
        if np.sign(s[j]) * np.sign(s[c]) < 0 and not (small[j] and small[c] and
                                                        types[j] is CausticType.DEGENERATE):
            pick = j if abs(s[j]) <= abs(s[c]) else c
            types[pick] = CausticType.CUSP
    return types


# --------------------------------------------------------------------------
# eikonal and transport residuals

def eikonal_residual(psi: ScalarField2D, medium: MediumSpec) -> ScalarField2D:
    """``|grad psi|^2 - n^2`` on the grid of ``psi``."""
    g = gradient(psi)
    X, Y = psi.grid.mesh()
    return ScalarField2D(psi.grid, g.u**2 + g.v**2 - medium.n2(X, Y))


def transport_residual(U0: ScalarField2D, psi: ScalarField2D,
                       Uj: ScalarField2D | None = None, Uj_prev: ScalarField2D | None = None) -> ScalarField2D:
    """Residual of the leading transport equation, or of the ``j``-th one.

    Without ``Uj`` this is ``2 grad(psi).grad(U0) + lap(psi) U0``.  With
    ``Uj`` and ``Uj_prev`` it is ``2 U0 grad(psi).grad(Uj / U0) + lap(Uj_prev)``.
    """
    if U0.grid != psi.grid:
        raise DomainError("fields must share a grid")
    gp = gradient(psi)
    if Uj is None:
        gU = gradient(U0)
        lap = laplacian(psi)
        return ScalarField2D(psi.grid, 2 * (gp.u * gU.u + gp.v * gU.v) + lap.values * U0.values)
    if Uj_prev is None:
        raise DomainError("higher transport equations need U_{j-1}")
    if np.any(U0.values == 0):
        raise AmplitudeZeroError("U0 vanishes at a grid node")
    ratio = gradient(ScalarField2D(psi.grid, Uj.values / U0.values))
    lap = laplacian(Uj_prev)
    return ScalarField2D(psi.grid, 2 * U0.values * (gp.u * ratio.u + gp.v * ratio.v) + lap.values)


def phase_from_fan(fan: RayFan, grid: Grid2D, newton_iter: int = 30) -> tuple[ScalarField2D, np.ndarray]:
    """Interpolate the eikonal phase of a single-valued fan onto a grid.

    Quintic splines of ``x``, ``y`` and ``psi`` over ``(xi, tau)`` are
    inverted node by node with Newton's method.  Returns the phase field
    and a mask of nodes inside the fan (others hold the nearest value).
    """
    kx = min(5, fan.xi.size - 1)
    kt = min(5, fan.tau.size - 1)
    sx = RectBivariateSpline(fan.xi, fan.tau, fan.r[..., 0], kx=kx, ky=kt)
    sy = RectBivariateSpline(fan.xi, fan.tau, fan.r[..., 1], kx=kx, ky=kt)
    sp = RectBivariateSpline(fan.xi, fan.tau, fan.psi, kx=kx, ky=kt)
    X, Y = grid.mesh()
    px, py = X.ravel(), Y.ravel()
    # starting guess: nearest lattice node
    pts = fan.r.reshape(-1, 2)
    _, nearest = cKDTree(pts).query(np.column_stack([px, py]))
    a = fan.xi[nearest // fan.tau.size].astype(float)
    t = fan.tau[nearest % fan.tau.size].astype(float)
    for _ in range(newton_iter):
        fx = sx.ev(a, t) - px
        fy = sy.ev(a, t) - py
        xa, xt = sx.ev(a, t, dx=1), sx.ev(a, t, dy=1)
        ya, yt = sy.ev(a, t, dx=1), sy.ev(a, t, dy=1)
        det = xa * yt - xt * ya
        da = (yt * fx - xt * fy) / det
        dt = (-ya * fx + xa * fy) / det
        a = np.clip(a - da, fan.xi[0], fan.xi[-1])
        t = np.clip(t - dt, fan.tau[0], fan.tau[-1])
        if np.max(np.abs(da)) < 1e-14 and np.max(np.abs(dt)) < 1e-14:
            break
    err = np.hypot(sx.ev(a, t) - px, sy.ev(a, t) - py)
    inside = (err < 1e-9).reshape(grid.shape)
    return ScalarField2D(grid, sp.ev(a, t).reshape(grid.shape)), inside

"""Plane wavefronts moving at unit speed along their normals.

A front starts as a curve ``c(s)`` and at time ``t`` occupies
``W(t) = c(s) +/- t n(s)`` where ``n`` is the unit tangent rotated
counterclockwise.  For a graph ``y = f(x)`` this is
``n = (-f', 1) / sqrt(1 + f'^2)``.  Differentiating,

    dW/ds = c'(s) (1 -/+ t kappa(s))

with ``kappa`` the signed curvature, so both tangent components vanish
together at ``t = 1 / (+/- kappa)``.  A graph bending towards ``n`` focuses
the ``Plus`` front; the ``Minus`` front of the same graph never does.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import interpolate, optimize

from .errors import ConvergenceError, DomainError, NumericalInputError
from .fields import ParametricCurve

__all__ = [
    "Direction",
    "SourceCurve",
    "EvolvedFront",
    "unit_normal",
    "curvature",
    "front_tangent",
    "evolve",
    "singular_times",
    "quartic_singular_time",
    "first_singular_time",
    "detect_front_singularities",
    "self_intersections",
]

T_SEARCH_MAX = 1e12
VERIFY_RTOL = 1e-8


class Direction(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> float:
        return 1.0 if self is Direction.PLUS else -1.0


def _fd(func, h=1e-5):
    # fourth-order central difference
    def d(s):
        s = np.asarray(s, dtype=float)
        return (func(s - 2 * h) - 8 * func(s - h) + 8 * func(s + h) - func(s + 2 * h)) / (12 * h)
    return d


@dataclass(frozen=True)
class SourceCurve:
    """Smooth plane curve ``s -> (X(s), Y(s))`` on ``[s_min, s_max]``.

    ``d1`` and ``d2`` return the first and second derivatives as ``(n, 2)``
    arrays.  Graphs use ``s = x``.
    """

    point: Callable
    d1: Callable
    d2: Callable
    s_min: float
    s_max: float
    name: str = "curve"

    def __post_init__(self):
        if not self.s_min < self.s_max:
            raise DomainError("curve interval must satisfy s_min < s_max")

    @classmethod
    def graph(cls, f: Callable, df: Callable, d2f: Callable | None = None,
              interval=(-1.0, 1.0), name: str = "graph") -> "SourceCurve":
        """Graph of ``f`` with derivative ``df`` (and ``d2f``, else differenced)."""
        d2f = _fd(df) if d2f is None else d2f

        def stack(a, b):
            a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
            return np.stack([a, b], axis=-1)

        return cls(lambda x: stack(x, f(x)),
                   lambda x: stack(np.ones_like(np.asarray(x, dtype=float)), df(x)),
                   lambda x: stack(np.zeros_like(np.asarray(x, dtype=float)), d2f(x)),
                   float(interval[0]), float(interval[1]), name)

    @classmethod
    def quartic(cls, interval=(-2.0, 2.0)) -> "SourceCurve":
        """``y = x^4``."""
        return cls.graph(lambda x: x**4, lambda x: 4 * x**3, lambda x: 12 * x**2, interval, "quartic")

    @classmethod
    def circle(cls, radius: float = 1.0, center=(0.0, 0.0)) -> "SourceCurve":
        """Counterclockwise circle; its ``Plus`` front moves inwards."""
        if not radius > 0:
            raise DomainError("radius must be positive")
        cx, cy = center
        R = float(radius)

        def pt(s):
            s = np.asarray(s, dtype=float)
            return np.stack([cx + R * np.cos(s), cy + R * np.sin(s)], axis=-1)

        def d1(s):
            s = np.asarray(s, dtype=float)
            return np.stack([-R * np.sin(s), R * np.cos(s)], axis=-1)

        def d2(s):
            s = np.asarray(s, dtype=float)
            return np.stack([-R * np.cos(s), -R * np.sin(s)], axis=-1)

        return cls(pt, d1, d2, 0.0, 2.0 * np.pi, "circle")

    @classmethod
    def from_table(cls, x, y) -> "SourceCurve":
        """Graph through tabulated samples, interpolated by a cubic spline."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 4:
            raise NumericalInputError("table needs matching x and y with at least 4 samples")
        if not np.all(np.diff(x) > 0):
            raise NumericalInputError("table x must increase strictly")
        spl = interpolate.CubicSpline(x, y)
        return cls.graph(spl, spl.derivative(1), spl.derivative(2), (x[0], x[-1]), "table")

    def reversed(self) -> "SourceCurve":
        """Same curve traversed backwards, ``s -> -s``; its normal is flipped."""
        return SourceCurve(lambda s: self.point(-np.asarray(s, dtype=float)),
                           lambda s: -self.d1(-np.asarray(s, dtype=float)),
                           lambda s: self.d2(-np.asarray(s, dtype=float)),
                           -self.s_max, -self.s_min, self.name + "-reversed")

    def samples(self, n: int, endpoint: bool = True) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, n, endpoint=endpoint)


def unit_normal(src: SourceCurve, s) -> np.ndarray:
    """Unit tangent rotated counterclockwise; ``(n, 2)`` or ``(2,)``."""
    d = np.asarray(src.d1(s), dtype=float)
    if not np.all(np.isfinite(d)):
        raise NumericalInputError("curve derivative is not finite")
    speed = np.hypot(d[..., 0], d[..., 1])
    if np.any(speed == 0):
        raise DomainError("curve is not regular (zero derivative)")
    return np.stack([-d[..., 1], d[..., 0]], axis=-1) / speed[..., None]


def curvature(src: SourceCurve, s):
    """Signed curvature, positive when the curve bends towards its normal."""
    d1 = np.asarray(src.d1(s), dtype=float)
    d2 = np.asarray(src.d2(s), dtype=float)
    cross = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
    return cross / np.hypot(d1[..., 0], d1[..., 1]) ** 3


@dataclass(frozen=True, eq=False)
class EvolvedFront:
    """Front samples at time ``t`` together with ``dW/ds`` at each sample."""

    t: float
    direction: Direction
    curve: ParametricCurve
    tangent: np.ndarray

    def __post_init__(self):
        tan = np.asarray(self.tangent, dtype=float)
        if tan.shape != self.curve.points.shape:
            raise NumericalInputError("tangent must have one row per sample")
        tan = tan.copy()
        tan.setflags(write=False)
        object.__setattr__(self, "tangent", tan)


def front_tangent(src: SourceCurve, t: float, direction: Direction, s) -> np.ndarray:
    """``dW/ds = c'(s) (1 -/+ t kappa(s))``."""
    fac = 1.0 - direction.sign * t * curvature(src, s)
    return np.asarray(src.d1(s), dtype=float) * np.asarray(fac)[..., None]


def evolve(src: SourceCurve, t: float, direction: Direction, samples=201) -> EvolvedFront:
    """Move the source ``t`` units along ``+n`` (``Plus``) or ``-n`` (``Minus``).

    ``samples`` is a count of equispaced parameters or an explicit array.
    """
    if not t >= 0:
        raise DomainError("time must be non-negative")
    s = src.samples(samples) if np.isscalar(samples) else np.asarray(samples, dtype=float)
    if np.any(s < src.s_min) or np.any(s > src.s_max):
        raise DomainError("samples outside the curve interval")
    sg = direction.sign
    n = unit_normal(src, s)
    pts = np.asarray(src.point(s), dtype=float) + sg * t * n
    return EvolvedFront(float(t), direction, ParametricCurve(s, pts), front_tangent(src, t, direction, s))


def _focus_factor(src, direction, s):
    # projection of dW/ds onto c': 1 -/+ t kappa, linear in t
    k = float(curvature(src, s))
    sg = direction.sign
    return lambda t: 1.0 - sg * t * k


def singular_times(src: SourceCurve, direction: Direction, x_range, include_missing: bool = False):
    """Time at which each sample of the front becomes singular.

    Parameters
    ----------
    x_range : array_like or (float, float, int)
        Sample parameters, or ``(lo, hi, n)`` for ``n`` equispaced samples.
    include_missing : bool
        Also list samples without a positive singular time, as ``(s, None)``.

    Returns
    -------
    list of (float, float or None)
        The root of ``1 -/+ t kappa(s) = 0`` found by bracketing and Brent's
        method, verified against the full tangent ``dW/ds``.  Samples with
        zero curvature or curvature of the wrong sign have no root.
    """
    if isinstance(x_range, tuple) and len(x_range) == 3:
        xs = np.linspace(*x_range)
    else:
        xs = np.atleast_1d(np.asarray(x_range, dtype=float))
    out = []
    for s in xs:
        g = _focus_factor(src, direction, s)
        hi = 1.0
        while g(hi) > 0 and hi < T_SEARCH_MAX:
            hi *= 2.0
        if g(hi) > 0 or not np.isfinite(g(hi)):
            if include_missing:
                out.append((float(s), None))
            continue
        lo = 0.0 if hi == 1.0 else hi / 2.0
        try:
            t, info = optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                      full_output=True, maxiter=200)
        except (ValueError, RuntimeError) as exc:
            raise ConvergenceError(f"singular-time root finding failed at s={s}: {exc}") from exc
        if not info.converged:
            raise ConvergenceError(f"singular-time root finding did not converge at s={s}")
        tan = front_tangent(src, t, direction, s)
        speed = np.hypot(*np.asarray(src.d1(s), dtype=float))
        if np.hypot(*tan) > VERIFY_RTOL * max(speed, 1.0):
            raise ConvergenceError(f"tangent does not vanish at the root (s={s})")
        out.append((float(s), float(t)))
    return out


def quartic_singular_time(x):
    """``[1 + (4x^3)^2]^(3/2) / (12 x^2)``, the focusing time of ``y = x^4``."""
    x = np.asarray(x, dtype=float)
    return (1.0 + 16.0 * x**6) ** 1.5 / (12.0 * x**2)


def first_singular_time(src: SourceCurve, direction: Direction, x_range=None, n_scan: int = 201):
    """Earliest singular time over an interval, by golden-section search.

    A coarse scan brackets the minimum of ``t(s)`` and golden-section
    search refines it.  Returns ``(s, t)`` or ``None``.
    """
    lo, hi = (src.s_min, src.s_max) if x_range is None else x_range
    xs = np.linspace(lo, hi, n_scan)
    ts = np.array([(t if t is not None else np.inf)
                   for _, t in singular_times(src, direction, xs, include_missing=True)])
    if not np.any(np.isfinite(ts)):
        return None
    i = int(np.argmin(ts))
    if i == 0 or i == xs.size - 1:
        return float(xs[i]), float(ts[i])

    def t_of(s):
        r = singular_times(src, direction, np.array([s]))
        return r[0][1] if r else np.inf

    res = optimize.minimize_scalar(t_of, bracket=(xs[i - 1], xs[i], xs[i + 1]), method="golden",
                                   tol=1e-10)
    return float(res.x), float(res.fun)


def detect_front_singularities(front: EvolvedFront, tol: float) -> list[int]:
    """Sample indices where both tangent components are at most ``tol``."""
    tan = front.tangent
    return [int(i) for i in np.nonzero((np.abs(tan[:, 0]) <= tol) & (np.abs(tan[:, 1]) <= tol))[0]]


def self_intersections(front: EvolvedFront) -> np.ndarray:
    """Crossing points of non-adjacent polyline segments, ``(m, 2)``.

    After focusing a front folds over itself (the swallowtail); the
    crossings are reported but not classified.
    """
    p = front.curve.points
    a, b = p[:-1], p[1:]
    d = b - a
    n = a.shape[0]
    i, j = np.triu_indices(n, k=2)
    di, dj = d[i], d[j]
    denom = di[:, 0] * dj[:, 1] - di[:, 1] * dj[:, 0]
    w = a[j] - a[i]
    ok = denom != 0
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (w[:, 0] * dj[:, 1] - w[:, 1] * dj[:, 0]) / denom
        v = (w[:, 0] * di[:, 1] - w[:, 1] * di[:, 0]) / denom
    hit = ok & (u >= 0) & (u < 1) & (v >= 0) & (v < 1)
    return a[i[hit]] + u[hit, None] * di[hit]

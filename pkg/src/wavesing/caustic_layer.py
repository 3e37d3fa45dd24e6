"""Uniform asymptotics across a fold caustic.

Near a smooth caustic the field is sought in the form

    u = {g0 V(k^(2/3) rho) + g1 / (i k^(1/3)) V'(k^(2/3) rho)} exp(i k theta)

where ``V`` solves the Airy equation ``V'' + t V = 0``.  Matching powers of
``k`` gives two eikonal-type conditions on ``(theta, rho)`` and two
transport-type conditions on ``(g0, g1)``.  In the illuminated zone
(``rho > 0``) the phases ``psi = theta +/- (2/3) rho^(3/2)`` recover the
ordinary eikonal equation and the field splits into two geometrical-optics
waves; in the shadow (``rho < 0``) it decays exponentially.

The Airy branch is fixed as ``V(t) = Ai(-t)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, NumericalInputError
from .fields import ComplexField2D, Grid2D, ScalarField2D, gradient, laplacian

__all__ = [
    "AirySolution",
    "Zone",
    "UniformAnsatz",
    "airy_solve",
    "canonical_airy",
    "airy_asymptotic",
    "canonical_fold_ansatz",
    "eikonal_pair_residuals",
    "combine_phases",
    "transport_pair_residuals",
    "z_variables",
    "evaluate_uniform_field",
    "geometric_optics_field",
    "zone_partition",
]

AIRY_ORDER = 30
AIRY_STEP_TOL = 1e-18
AIRY_MAX_STEP = 1.0
AIRY_MAX_STEPS = 200_000
AIRY_RESIDUAL_TOL = 1e-10
ASYMPTOTIC_START = 12.0
ZONE_RTOL = 1e-10


# ---------------------------------------------------------------- Airy solver

class AirySolution:
    """Piecewise Taylor polynomials solving ``V'' + t V = 0``.

    Each segment covers ``[left_k, left_{k+1}]`` and holds the coefficients
    of ``V(c_k + h)`` in powers of ``h`` about its expansion point ``c_k``
    (one of the segment ends).  Evaluation is exact polynomial
    arithmetic, so ``V``, ``V'`` and ``V''`` come from the same dense
    output.
    """

    def __init__(self, lefts: np.ndarray, centres: np.ndarray, coefs: np.ndarray,
                 t_min: float, t_max: float):
        self._lefts = lefts
        self._centres = centres
        self._coefs = coefs
        self.t_min = float(t_min)
        self.t_max = float(t_max)
        n = coefs.shape[1]
        self._d1 = coefs[:, 1:] * np.arange(1, n)
        self._d2 = self._d1[:, 1:] * np.arange(1, n - 1)

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_min) or np.any(t > self.t_max) or not np.all(np.isfinite(t)):
            raise DomainError(f"argument outside the solved interval [{self.t_min}, {self.t_max}]")
        idx = np.clip(np.searchsorted(self._lefts, t, side="right") - 1, 0, self._lefts.size - 1)
        return t, idx, t - self._centres[idx]

    @staticmethod
    def _horner(c, h):
        acc = c[..., -1]
        for j in range(c.shape[-1] - 2, -1, -1):
            acc = acc * h + c[..., j]
        return acc

    def __call__(self, t):
        return self.value(t)

    def value(self, t):
        t, idx, h = self._locate(t)
        return self._horner(self._coefs[idx], h)

    def derivative(self, t):
        t, idx, h = self._locate(t)
        return self._horner(self._d1[idx], h)

    def second_derivative(self, t):
        t, idx, h = self._locate(t)
        return self._horner(self._d2[idx], h)

    def residual(self, t):
        """``V'' + t V`` of the dense output."""
        t = np.asarray(t, dtype=float)
        return self.second_derivative(t) + t * self.value(t)

    def max_residual(self, n: int = 1000, lo: float | None = None, hi: float | None = None) -> float:
        """Largest residual on ``n`` equispaced points, scaled by ``max(1, max|V|)``."""
        lo = self.t_min if lo is None else lo
        hi = self.t_max if hi is None else hi
        t = np.linspace(lo, hi, n)
        scale = max(1.0, float(np.max(np.abs(self.value(t)))))
        return float(np.max(np.abs(self.residual(t)))) / scale


def _taylor_coefficients(t0, v0, d0, order):
    a = np.zeros(order + 1)
    a[0], a[1] = v0, d0
    a[2] = -t0 * v0 / 2.0
    for n in range(1, order - 1):
        a[n + 2] = -(t0 * a[n] + a[n - 1]) / ((n + 2) * (n + 1))
    return a


def _step_size(a, limit):
    scale = max(abs(a[0]), abs(a[1]))
    if scale == 0.0:
        return limit
    h = limit
    n = a.size - 1
    for j in (n - 1, n):
        if a[j] != 0.0:
            h = min(h, (AIRY_STEP_TOL * scale / abs(a[j])) ** (1.0 / j))
    return h


def _march(t0, v0, d0, t_end, order):
    """Taylor steps from ``t0`` to ``t_end`` in either direction."""
    sign = 1.0 if t_end >= t0 else -1.0
    knots, coefs = [], []
    t, v, d = t0, v0, d0
    while sign * (t_end - t) > 0:
        if len(knots) >= AIRY_MAX_STEPS:
            raise ConvergenceError("interval too large for the requested tolerance")
        # overflow is reported below as a ConvergenceError
        with np.errstate(over="ignore", invalid="ignore"):
            a = _taylor_coefficients(t, v, d, order)
            h = min(_step_size(a, AIRY_MAX_STEP), sign * (t_end - t))
            knots.append(t)
            coefs.append(a)
            hs = sign * h
            powers = hs ** np.arange(order + 1)
            v = float(a @ powers)
            d = float((a[1:] * np.arange(1, order + 1)) @ powers[:-1])
        t = t_end if h == sign * (t_end - t) else t + hs
        if not (np.isfinite(v) and np.isfinite(d)):
            raise ConvergenceError("Airy solution overflowed; interval too large")
    return knots, coefs, t, v, d


def airy_solve(t_min: float, t_max: float, init, t0: float | None = None,
               order: int = AIRY_ORDER, tol: float = AIRY_RESIDUAL_TOL) -> AirySolution:
    """Solve ``V'' + t V = 0`` on ``[t_min, t_max]``.

    Parameters
    ----------
    t_min, t_max : float
        Interval of the dense output.
    init : (float, float)
        ``(V(t0), V'(t0))``.
    t0 : float, optional
        Where the initial data are given; ``0`` if it lies in the interval,
        else ``t_min``.
    order : int
        Degree of the Taylor polynomial of each step.
    tol : float
        Residual threshold checked on 1000 points after the solve.

    Raises
    ------
    ConvergenceError
        If the residual check fails or the march exhausts its step budget.
    """
    if not t_min < t_max:
        raise NumericalInputError("need t_min < t_max")
    v0, d0 = (float(x) for x in init)
    if not (np.isfinite(v0) and np.isfinite(d0) and np.isfinite(t_min) and np.isfinite(t_max)):
        raise NumericalInputError("initial data and interval must be finite")
    if t0 is None:
        t0 = 0.0 if t_min <= 0.0 <= t_max else t_min
    if not t_min <= t0 <= t_max:
        raise DomainError("t0 must lie inside [t_min, t_max]")

    kf, cf, *_ = _march(t0, v0, d0, t_max, order) if t0 < t_max else ([], [], None)
    kb, cb, *_ = _march(t0, v0, d0, t_min, order) if t0 > t_min else ([], [], None)
    # a backward step expanded at kb[i] covers [kb[i+1], kb[i]]
    lefts = (kb[1:] + [t_min])[::-1] + kf if kb else list(kf)
    centres = kb[::-1] + kf
    coefs = cb[::-1] + cf
    sol = AirySolution(np.array(lefts), np.array(centres), np.array(coefs), t_min, t_max)
    res = sol.max_residual(1000)
    if not res <= tol:
        raise ConvergenceError(f"Airy residual {res:.3e} exceeds {tol:.1e}; interval too large")
    return sol


def airy_asymptotic(s, terms: int = 40):
    """``(Ai(s), Ai'(s))`` from the large-argument series, ``s >= 12``.

    The series is summed up to its smallest term; at ``s = 12`` the
    truncation error is far below double precision.
    """
    s = float(s)
    if s < ASYMPTOTIC_START:
        raise DomainError(f"asymptotic series needs s >= {ASYMPTOTIC_START}")
    zeta = 2.0 / 3.0 * s**1.5
    su, sv = 1.0, 1.0
    u = 1.0
    last = np.inf
    for k in range(1, terms):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        term = u / zeta**k
        if term >= last:
            break
        last = term
        su += (-1) ** k * term
        sv += (-1) ** k * v / zeta**k
    pre = np.exp(-zeta) / (2.0 * np.sqrt(np.pi))
    return pre * su / s**0.25, -pre * sv * s**0.25


def canonical_airy(t_min: float, t_max: float, **kw) -> AirySolution:
    """``V(t) = Ai(-t)`` on ``[t_min, t_max]``.

    Integration starts in the shadow at ``t <= -12`` from the asymptotic
    series and runs towards increasing ``t``, the direction in which the
    decaying branch dominates.
    """
    start = min(t_min, -ASYMPTOTIC_START)
    ai, aip = airy_asymptotic(-start)
    sol = airy_solve(start, t_max, (ai, -aip), t0=start, **kw)
    if start < t_min:
        sol.t_min = float(t_min)
    return sol


# ---------------------------------------------------------------- ansatz

class Zone(enum.IntEnum):
    SHADOW = -1
    CAUSTIC = 0
    ILLUMINATED = 1


@dataclass(frozen=True, eq=False)
class UniformAnsatz:
    """Fields ``theta, rho, g0, g1`` of the uniform expansion and wave number ``k``."""

    theta: ScalarField2D
    rho: ScalarField2D
    g0: ScalarField2D
    g1: ScalarField2D
    k: float

    def __post_init__(self):
        grid = self.theta.grid
        if any(f.grid != grid for f in (self.rho, self.g0, self.g1)):
            raise NumericalInputError("ansatz fields must share one grid")
        if not self.k > 0:
            raise DomainError("wave number k must be positive")

    @property
    def grid(self) -> Grid2D:
        return self.theta.grid

    @property
    def zone_tol(self) -> float:
        return ZONE_RTOL * max(1.0, float(np.max(np.abs(self.rho.values))))


def zone_partition(ansatz: UniformAnsatz) -> np.ndarray:
    """Tag every node as shadow, caustic or illuminated."""
    rho = ansatz.rho.values
    tags = np.where(rho > 0, Zone.ILLUMINATED, Zone.SHADOW).astype(np.int8)
    tags[np.abs(rho) <= ansatz.zone_tol] = Zone.CAUSTIC
    return tags


def canonical_fold_rho(y):
    """``rho = sign(y) (3|y|/2)^(2/3)``, so that ``rho rho'^2 = 1``."""
    y = np.asarray(y, dtype=float)
    return np.sign(y) * np.cbrt(1.5 * np.abs(y)) ** 2


def canonical_fold_ansatz(grid: Grid2D, k: float, g0: float = 1.0, g1: float = 0.0) -> UniformAnsatz:
    """Straight fold along ``y = 0``: ``theta = 0``, illuminated for ``y > 0``."""
    X, Y = grid.mesh()
    return UniformAnsatz(
        ScalarField2D(grid, np.zeros_like(X)),
        ScalarField2D(grid, canonical_fold_rho(Y)),
        ScalarField2D(grid, np.full_like(X, g0)),
        ScalarField2D(grid, np.full_like(X, g1)),
        float(k),
    )


def _dot(a, b):
    return a.u * b.u + a.v * b.v


def eikonal_pair_residuals(ansatz: UniformAnsatz) -> tuple[ScalarField2D, ScalarField2D]:
    """``|grad theta|^2 + rho |grad rho|^2 - 1`` and ``2 grad theta . grad rho``."""
    gt = gradient(ansatz.theta)
    gr = gradient(ansatz.rho)
    rho = ansatz.rho.values
    r1 = _dot(gt, gt) + rho * _dot(gr, gr) - 1.0
    r2 = 2.0 * _dot(gt, gr)
    return ScalarField2D(ansatz.grid, r1), ScalarField2D(ansatz.grid, r2)


def _zone_mask(ansatz, mask, strict):
    rho = ansatz.rho.values
    m = np.ones(rho.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if m.shape != rho.shape:
        raise NumericalInputError("mask shape does not match the grid")
    tol = ansatz.zone_tol
    bad = (rho <= 0) if strict else (rho < -tol)
    if np.any(bad & m):
        raise DomainError("rho must be positive on the evaluated zone" if strict
                          else "rho must be non-negative on the evaluated zone")
    return m


def combine_phases(ansatz: UniformAnsatz, mask=None) -> tuple[ScalarField2D, ScalarField2D]:
    """Phases ``psi = theta +/- (2/3) rho^(3/2)`` of the two ray families.

    ``mask`` selects the nodes to evaluate (all by default); other nodes
    are set to zero.  Roundoff-level negative ``rho`` is clipped to zero.
    """
    m = _zone_mask(ansatz, mask, strict=False)
    rho = np.where(m, np.clip(ansatz.rho.values, 0.0, None), 0.0)
    shift = 2.0 / 3.0 * rho**1.5
    th = np.where(m, ansatz.theta.values, 0.0)
    return ScalarField2D(ansatz.grid, th + shift), ScalarField2D(ansatz.grid, th - shift)


def transport_pair_residuals(ansatz: UniformAnsatz) -> tuple[ScalarField2D, ScalarField2D]:
    """Residuals of the two next-order conditions on ``g0`` and ``g1``."""
    gt, gr = gradient(ansatz.theta), gradient(ansatz.rho)
    g0v, g1v = gradient(ansatz.g0), gradient(ansatz.g1)
    lt, lr = laplacian(ansatz.theta).values, laplacian(ansatz.rho).values
    rho, g0, g1 = ansatz.rho.values, ansatz.g0.values, ansatz.g1.values
    r15 = (2.0 * _dot(gt, g0v) + lt * g0 + 2.0 * rho * _dot(gr, g1v)
           + rho * lr * g1 + _dot(gr, gr) * g1)
    r16 = 2.0 * _dot(gr, g0v) + lr * g0 + 2.0 * _dot(gt, g1v) + lt * g1
    return ScalarField2D(ansatz.grid, r15), ScalarField2D(ansatz.grid, r16)


def z_variables(ansatz: UniformAnsatz, mask=None) -> tuple[ScalarField2D, ScalarField2D]:
    """``z = (g0 +/- sqrt(rho) g1) / rho^(1/4)`` on the illuminated side.

    Nodes outside ``mask`` are set to zero.

    Written in these variables the transport conditions take the ordinary
    ray form plus an extra term that shifts the phase across the caustic.
    """
    m = _zone_mask(ansatz, mask, strict=True)
    rho = np.where(m, ansatz.rho.values, 1.0)
    sq = np.sqrt(rho)
    q = np.sqrt(sq)
    g0, g1 = ansatz.g0.values, ansatz.g1.values
    zp = np.where(m, (g0 + sq * g1) / q, 0.0)
    zm = np.where(m, (g0 - sq * g1) / q, 0.0)
    return ScalarField2D(ansatz.grid, zp), ScalarField2D(ansatz.grid, zm)


def evaluate_uniform_field(ansatz: UniformAnsatz, airy: AirySolution) -> ComplexField2D:
    """The uniform field on every node, including the caustic itself."""
    k = ansatz.k
    t = k ** (2.0 / 3.0) * ansatz.rho.values
    if t.min() < airy.t_min or t.max() > airy.t_max:
        raise DomainError(f"Airy argument range [{t.min():.6g}, {t.max():.6g}] exceeds the solved "
                          f"interval [{airy.t_min}, {airy.t_max}]")
    V, dV = airy.value(t), airy.derivative(t)
    amp = ansatz.g0.values * V + ansatz.g1.values / (1j * k ** (1.0 / 3.0)) * dV
    return ComplexField2D(ansatz.grid, amp * np.exp(1j * k * ansatz.theta.values))


def geometric_optics_field(ansatz: UniformAnsatz, mask=None) -> tuple[ComplexField2D, ScalarField2D]:
    """Two-ray approximation valid deep in the illuminated zone.

    Returns the field and the amplitude scale
    ``k^(-1/6) (|z+| + |z-|) / (2 sqrt(pi))`` used to normalise errors.
    Both vanish outside ``mask`` (default: the illuminated zone).
    The rays carry phases ``k psi +/- pi/4``; the quarter-period offset is
    the phase shift picked up on touching the caustic.
    """
    k = ansatz.k
    if mask is None:
        mask = ansatz.rho.values > ansatz.zone_tol
    zp, zm = z_variables(ansatz, mask)
    pp, pm = combine_phases(ansatz, mask)
    pre = k ** (-1.0 / 6.0) / (2.0 * np.sqrt(np.pi))
    u = pre / 1j * (zp.values * np.exp(1j * (k * pp.values + np.pi / 4))
                    - zm.values * np.exp(1j * (k * pm.values - np.pi / 4)))
    u = np.where(mask, u, 0.0)
    scale = pre * (np.abs(zp.values) + np.abs(zm.values))
    return ComplexField2D(ansatz.grid, u), ScalarField2D(ansatz.grid, scale)

"""Hodograph image of the mixed-type system and its Jacobian.

In the hodograph plane the inverse map ``(u, v) -> (x, y)`` satisfies

    (f - u^2) x_u - 2 u v x_v + (f - v^2) y_v = 0,        x_v = y_u,

and its Jacobian ``J = x_u y_v - x_v^2`` can be written as

    J = [((f - u^2) x_u - u v x_v)^2 + f (f - u^2 - v^2) x_v^2]
        / [-(f - u^2)(f - v^2)].

Inside the elliptic region ``u^2 + v^2 < f`` this is never positive and
vanishes only where ``x_u = x_v = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .errors import ConvergenceError, DomainError, ParabolicDegeneracyError
from .fields import Grid2D

__all__ = [
    "FCoefficient",
    "HodographPoint",
    "JacobianPair",
    "TheoremReport",
    "jacobian_closed_form",
    "jacobian_numerator",
    "degeneracy_factor",
    "elliptic_region_test",
    "verify_theorem_numerically",
]

CONSISTENCY_RTOL = 1e-12


@dataclass(frozen=True)
class FCoefficient:
    """Non-negative coefficient ``f(u, v)``; vectorised over numpy arrays."""

    func: Callable
    name: str = "custom"

    def __call__(self, u, v):
        return self.func(u, v)

    @classmethod
    def unity(cls) -> "FCoefficient":
        return cls(lambda u, v: np.ones_like(np.asarray(u, dtype=float) + np.asarray(v, dtype=float)), "unity")

    @classmethod
    def quartic(cls) -> "FCoefficient":
        return cls(lambda u, v: (np.asarray(u) ** 2 + np.asarray(v) ** 2) ** 2, "quartic")


@dataclass(frozen=True)
class HodographPoint:
    u: float
    v: float
    x_u: float
    x_v: float
    y_u: float
    y_v: float

    def __post_init__(self):
        if not np.isfinite([self.u, self.v, self.x_u, self.x_v, self.y_u, self.y_v]).all():
            raise DomainError("hodograph point entries must be finite")

    @classmethod
    def from_x_derivatives(cls, u, v, x_u, x_v, f: FCoefficient) -> "HodographPoint":
        """Fill ``y_u`` from ``x_v = y_u`` and ``y_v`` from the first equation."""
        fv = float(f(u, v))
        den = fv - v * v
        if den == 0.0:
            raise ParabolicDegeneracyError("f - v^2 vanishes; y_v is not determined")
        y_v = -((fv - u * u) * x_u - 2.0 * u * v * x_v) / den
        return cls(u, v, x_u, x_v, x_v, y_v)


@dataclass(frozen=True)
class JacobianPair:
    direct: float
    closed_form: float

    @property
    def value(self) -> float:
        return self.closed_form


def jacobian_numerator(p: HodographPoint, f: FCoefficient) -> float:
    fv = float(f(p.u, p.v))
    return ((fv - p.u**2) * p.x_u - p.u * p.v * p.x_v) ** 2 + fv * (fv - p.u**2 - p.v**2) * p.x_v**2


def degeneracy_factor(p: HodographPoint, f: FCoefficient) -> float:
    """``(f - u^2) x_u - u v x_v``; on the unit circle with ``f = 1`` this is ``v (v x_u - u x_v)``."""
    fv = float(f(p.u, p.v))
    return (fv - p.u**2) * p.x_u - p.u * p.v * p.x_v


def _closed_form(u, v, x_u, x_v, fv):
    num = ((fv - u * u) * x_u - u * v * x_v) ** 2 + fv * (fv - u * u - v * v) * x_v**2
    return num / (-(fv - u * u) * (fv - v * v))


def jacobian_closed_form(p: HodographPoint, f: FCoefficient) -> JacobianPair:
    """Jacobian of the hodograph map, directly and through the closed form.

    The closed form eliminates ``y_v`` with the first hodograph equation,
    so the two agree only when the point satisfies both equations; a
    mismatch beyond ``1e-12`` relative raises ``DomainError``.
    """
    fv = float(f(p.u, p.v))
    if fv < 0:
        raise DomainError("f must be non-negative")
    if not np.isclose(p.y_u, p.x_v, rtol=1e-12, atol=1e-300):
        raise DomainError("input violates x_v = y_u")
    den = (fv - p.u**2) * (fv - p.v**2)
    if den == 0.0:
        raise ParabolicDegeneracyError("(f - u^2)(f - v^2) vanishes")
    direct = p.x_u * p.y_v - p.x_v * p.y_u
    closed = _closed_form(p.u, p.v, p.x_u, p.x_v, fv)
    scale = max(abs(direct), abs(closed))
    if abs(direct - closed) > CONSISTENCY_RTOL * scale and scale > 0:
        raise DomainError(f"direct ({direct!r}) and closed-form ({closed!r}) Jacobians disagree; "
                          "the point does not satisfy the hodograph system")
    return JacobianPair(direct, closed)


def elliptic_region_test(u, v, f: FCoefficient):
    out = np.asarray(u) ** 2 + np.asarray(v) ** 2 < f(u, v)
    return bool(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class TheoremReport:
    """Outcome of a finite-difference check of the sign of ``J``.

    ``J`` and ``J_closed`` hold NaN outside the interior mask.
    """

    grid: Grid2D
    interior: np.ndarray
    x: np.ndarray
    J: np.ndarray
    J_closed: np.ndarray
    n_interior: int
    n_nonnegative: int
    n_near_zero: int
    max_J: float
    min_J: float
    max_rel_mismatch: float
    zero_tol: float

    @property
    def fraction_negative(self) -> float:
        return 1.0 - self.n_nonnegative / self.n_interior

    @property
    def near_zero_fraction(self) -> float:
        return self.n_near_zero / self.n_interior

    def summary(self) -> dict:
        return {
            "n_interior": self.n_interior,
            "n_nonnegative": self.n_nonnegative,
            "n_near_zero": self.n_near_zero,
            "fraction_negative": self.fraction_negative,
            "max_J": self.max_J,
            "min_J": self.min_J,
            "max_rel_mismatch": self.max_rel_mismatch,
        }


def _coefficients(f, U, V):
    fv = f(U, V)
    den = fv - V * V
    a = (fv - U * U) / den
    b = -2.0 * U * V / den
    return a, b


def verify_theorem_numerically(f: FCoefficient, domain: Grid2D, boundary_data: Callable,
                               radius: float | None = None, center=(0.0, 0.0),
                               zero_tol: float = 1e-12) -> TheoremReport:
    """Solve the hodograph system on a disc and check the sign of ``J``.

    Writing ``y_u = x_v`` and ``y_v = -(a x_u + b x_v)`` with
    ``a = (f - u^2)/(f - v^2)`` and ``b = -2uv/(f - v^2)``, the
    compatibility ``(y_u)_v = (y_v)_u`` gives the linear elliptic equation

        a x_uu + b x_uv + x_vv + a_u x_u + b_u x_v = 0

    for ``x`` alone.  It is discretised with second-order central
    differences (nine-point stencil for the mixed term) and Dirichlet data
    ``boundary_data(u, v)`` at every node outside the disc that a stencil
    touches.  ``y`` never needs to be integrated: its derivatives follow
    from the two hodograph equations.

    Parameters
    ----------
    f : FCoefficient
    domain : Grid2D
        Uniform grid in the ``(u, v)`` plane covering the disc.
    boundary_data : callable
        Dirichlet values for ``x``.
    radius : float, optional
        Disc radius; by default the largest disc inscribed in the grid.
    center : pair of float
        Disc centre.
    """
    U, V = domain.mesh()
    hu, hv = domain.hx, domain.hy
    cu, cv = center
    if radius is None:
        radius = min(cu - domain.x_min, domain.x_max - cu, cv - domain.y_min, domain.y_max - cv)
    r = np.hypot(U - cu, V - cv)
    interior = r < radius
    interior[0, :] = interior[-1, :] = interior[:, 0] = interior[:, -1] = False
    if not interior.any():
        raise DomainError("no interior nodes inside the disc")

    # every node a stencil touches must be elliptic
    touched = interior.copy()
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            touched |= np.roll(np.roll(interior, di, axis=0), dj, axis=1)
    fv = f(U, V)
    if np.any(fv < 0):
        raise DomainError("f must be non-negative")
    if not np.all((U * U + V * V < fv)[touched]):
        raise DomainError("domain touches or leaves the elliptic region u^2 + v^2 < f")

    # coefficients may be singular at untouched corner nodes; only touched ones are used
    with np.errstate(divide="ignore", invalid="ignore"):
        a, b = _coefficients(f, U, V)
        step = 1e-6 * max(1.0, radius)
        a_p, b_p = _coefficients(f, U + step, V)
        a_m, b_m = _coefficients(f, U - step, V)
        a_u = (a_p - a_m) / (2 * step)
        b_u = (b_p - b_m) / (2 * step)

    ny, nx = domain.shape
    idx = -np.ones(domain.shape, dtype=np.int64)
    rows_i, cols_i = np.nonzero(interior)
    n = rows_i.size
    idx[rows_i, cols_i] = np.arange(n)
    xb = np.asarray(boundary_data(U, V), dtype=float) * np.ones(domain.shape)

    ai, bi, aui, bui = a[rows_i, cols_i], b[rows_i, cols_i], a_u[rows_i, cols_i], b_u[rows_i, cols_i]
    # stencil offsets (drow, dcol) -> coefficient; rows are v, columns are u
    stencil = {
        (0, 0): -2 * ai / hu**2 - 2 / hv**2,
        (0, 1): ai / hu**2 + aui / (2 * hu),
        (0, -1): ai / hu**2 - aui / (2 * hu),
        (1, 0): np.full(n, 1 / hv**2) + bui / (2 * hv),
        (-1, 0): np.full(n, 1 / hv**2) - bui / (2 * hv),
        (1, 1): bi / (4 * hu * hv),
        (-1, -1): bi / (4 * hu * hv),
        (1, -1): -bi / (4 * hu * hv),
        (-1, 1): -bi / (4 * hu * hv),
    }
    I, Jc, vals = [], [], []
    rhs = np.zeros(n)
    for (dr, dc), coef in stencil.items():
        rr, cc = rows_i + dr, cols_i + dc
        nb = idx[rr, cc]
        inside = nb >= 0
        I.append(np.arange(n)[inside])
        Jc.append(nb[inside])
        vals.append(coef[inside])
        rhs[~inside] -= coef[~inside] * xb[rr[~inside], cc[~inside]]
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(I), np.concatenate(Jc))), shape=(n, n))
    sol = spsolve(A.tocsc(), rhs)
    if not np.all(np.isfinite(sol)):
        raise ConvergenceError("linear solve failed")

    x = xb.copy()
    x[rows_i, cols_i] = sol
    x_u = (x[rows_i, cols_i + 1] - x[rows_i, cols_i - 1]) / (2 * hu)
    x_v = (x[rows_i + 1, cols_i] - x[rows_i - 1, cols_i]) / (2 * hv)
    y_u = x_v
    y_v = -(ai * x_u + bi * x_v)
    Uu, Vv, Fv = U[rows_i, cols_i], V[rows_i, cols_i], fv[rows_i, cols_i]
    J_direct = x_u * y_v - x_v * y_u
    J_closed = _closed_form(Uu, Vv, x_u, x_v, Fv)

    scale = np.maximum(np.abs(J_direct), np.abs(J_closed))
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, np.abs(J_direct - J_closed) / scale, 0.0)

    J_full = np.full(domain.shape, np.nan)
    J_full[rows_i, cols_i] = J_direct
    Jc_full = np.full(domain.shape, np.nan)
    Jc_full[rows_i, cols_i] = J_closed
    return TheoremReport(
        grid=domain,
        interior=interior,
        x=x,
        J=J_full,
        J_closed=Jc_full,
        n_interior=int(n),
        n_nonnegative=int(np.count_nonzero(J_direct >= -zero_tol)),
        n_near_zero=int(np.count_nonzero(np.abs(J_direct) <= zero_tol)),
        max_J=float(J_direct.max()),
        min_J=float(J_direct.min()),
        max_rel_mismatch=float(rel.max()),
        zero_tol=zero_tol,
    )

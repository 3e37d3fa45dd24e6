"""Steady two-dimensional shallow-water flow.

Bernoulli gives the depth as ``h(Q) = (C - Q) / 2g`` with ``Q = u^2 + v^2``
and the local wave speed as ``c^2 = g h = (C - Q) / 2``.  Substituted in
the continuity equation, and with the irrotationality condition, the flow
satisfies

    (c^2 - u^2) u_x - 2 u v u_y + (c^2 - v^2) v_y = 0,
    u_y - v_x = 0,

which is elliptic where ``Q < c^2``, hyperbolic where ``Q > c^2`` and
parabolic on the sonic set ``Q = c^2`` (that is ``Q = C/3``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import CavitationError, DomainError
from .fields import Grid2D, ScalarField2D, VectorField2D, gradient

__all__ = [
    "FlowType",
    "SteadyFlowConfig",
    "FlowTypeMap",
    "depth_from_speed",
    "wave_speed_squared",
    "residuals",
    "classify_type",
    "energy_functional",
    "energy_density",
]

PARABOLIC_TOL = 1e-12


class FlowType(enum.IntEnum):
    ELLIPTIC = -1
    PARABOLIC = 0
    HYPERBOLIC = 1


@dataclass(frozen=True)
class SteadyFlowConfig:
    """Bernoulli constant ``C`` (units of velocity squared) and gravity ``g``.

    ``C / 2g`` is the stagnation depth.
    """

    C: float
    g: float = 9.81

    def __post_init__(self):
        if not self.C > 0:
            raise DomainError("Bernoulli constant C must be positive")
        if not self.g > 0:
            raise DomainError("g must be positive")


@dataclass(frozen=True, eq=False)
class FlowTypeMap:
    grid: Grid2D
    tags: np.ndarray

    def count(self, kind: FlowType) -> int:
        return int(np.count_nonzero(self.tags == kind))

    def band(self) -> np.ndarray:
        """Mask of the discrete parabolic set.

        Nodes tagged parabolic, plus nodes with a 4-neighbour of the
        opposite elliptic/hyperbolic type.
        """
        t = self.tags
        band = t == FlowType.PARABOLIC
        for axis in (0, 1):
            a = np.moveaxis(t, axis, 0)
            flip = (a[1:] * a[:-1]) < 0
            b = np.moveaxis(band, axis, 0)
            b[1:] |= flip
            b[:-1] |= flip
        return band


def _check_cavitation(Q, cfg):
    if np.any(np.asarray(Q) > cfg.C):
        raise CavitationError("flow speed squared exceeds the Bernoulli constant (negative depth)")


def depth_from_speed(Q, cfg: SteadyFlowConfig):
    """Bernoulli depth ``(C - Q) / 2g``."""
    Q = np.asarray(Q, dtype=float)
    if np.any(Q < 0):
        raise DomainError("Q = u^2 + v^2 must be non-negative")
    _check_cavitation(Q, cfg)
    h = (cfg.C - Q) / (2.0 * cfg.g)
    return float(h) if h.ndim == 0 else h


def wave_speed_squared(Q, cfg: SteadyFlowConfig):
    """``c^2 = g h = (C - Q) / 2``."""
    return cfg.g * depth_from_speed(Q, cfg)


def residuals(vf: VectorField2D, cfg: SteadyFlowConfig) -> tuple[ScalarField2D, ScalarField2D]:
    """Pointwise residuals of the reduced continuity equation and of the curl.

    The continuity residual uses the grouped form in which ``v_x`` has
    already been replaced by ``u_y``.  The curl residual is the vorticity
    ``v_x - u_y``.
    """
    Q = vf.speed_squared
    c2 = wave_speed_squared(Q, cfg)
    gu = gradient(ScalarField2D(vf.grid, vf.u))
    gv = gradient(ScalarField2D(vf.grid, vf.v))
    u, v = vf.u, vf.v
    r_cont = (c2 - u * u) * gu.u - 2.0 * u * v * gu.v + (c2 - v * v) * gv.v
    r_curl = gv.u - gu.v
    return ScalarField2D(vf.grid, r_cont), ScalarField2D(vf.grid, r_curl)


def classify_type(vf: VectorField2D, cfg: SteadyFlowConfig) -> FlowTypeMap:
    Q = vf.speed_squared
    disc = wave_speed_squared(Q, cfg) - Q
    tags = np.where(disc > 0, FlowType.ELLIPTIC, FlowType.HYPERBOLIC).astype(np.int8)
    tags[np.abs(disc) <= PARABOLIC_TOL * cfg.C] = FlowType.PARABOLIC
    return FlowTypeMap(vf.grid, tags)


def energy_density(Q, cfg: SteadyFlowConfig):
    """``int_0^Q c^2(s) ds = C Q / 2 - Q^2 / 4``."""
    Q = np.asarray(Q, dtype=float)
    _check_cavitation(Q, cfg)
    return 0.5 * cfg.C * Q - 0.25 * Q * Q


def energy_functional(vf: VectorField2D, cfg: SteadyFlowConfig, omega: Grid2D | None = None) -> float:
    """Energy over a node-aligned sub-rectangle (the whole grid by default)."""
    g = vf.grid
    rows, cols = (slice(None), slice(None)) if omega is None else g.subgrid_slices(omega)
    dens = energy_density(vf.speed_squared[rows, cols], cfg)
    x = g.x[cols]
    y = g.y[rows]
    return float(integrate.trapezoid(integrate.trapezoid(dens, x, axis=1), y))

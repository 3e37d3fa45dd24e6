"""Tidal-bore jump model over a small floor rise.

A steady current of speed ``u`` in water of depth ``H`` meets a rise of the
floor of height ``delta``; energy and continuity across the rise give the
surface elevation ``eps`` through the cubic relation

    (H^2 + 2 H eps + eps^2) 2 g eps = u^2 (2H + eps + delta) (eps - delta)

whose linearisation is ``eps = delta / (1 - (c/u)^2)`` with ``c^2 = g H``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoPhysicalRootError, SingularRegimeError

__all__ = [
    "Regime",
    "FlowRegime",
    "BoreInput",
    "froude",
    "elevation_first_order",
    "elevation_exact",
    "relation_sides",
    "relation_residual",
]

FROUDE_TIE_TOL = 1e-12
CRITICAL_GUARD = 1e-9
SMALL_RISE_WARN = 0.1


class Regime(enum.Enum):
    TRANQUIL = "tranquil"
    CRITICAL = "critical"
    SHOOTING = "shooting"


@dataclass(frozen=True)
class FlowRegime:
    tag: Regime
    froude: float


@dataclass(frozen=True)
class BoreInput:
    H: float
    delta: float
    u: float
    g: float = 9.81

    def __post_init__(self):
        if not self.H > 0:
            raise DomainError("undisturbed depth H must be positive")
        if not self.g > 0:
            raise DomainError("g must be positive")
        if not abs(self.delta) < self.H:
            raise DomainError("floor rise must satisfy |delta| < H")

    @property
    def c(self) -> float:
        return float(np.sqrt(self.g * self.H))


def froude(u: float, c: float) -> FlowRegime:
    """Froude number ``|u| / c`` and the matching flow regime."""
    if not c > 0:
        raise DomainError("propagation speed c must be positive")
    F = abs(u) / c
    if abs(F - 1.0) <= FROUDE_TIE_TOL:
        tag = Regime.CRITICAL
    elif F < 1.0:
        tag = Regime.TRANQUIL
    else:
        tag = Regime.SHOOTING
    return FlowRegime(tag, F)


def _guard(inp: BoreInput):
    if inp.u == 0.0:
        raise SingularRegimeError("u = 0: the first-order elevation is undefined")
    F = abs(inp.u) / inp.c
    if abs(F - 1.0) <= CRITICAL_GUARD:
        raise SingularRegimeError(f"critical flow (F = {F!r}); elevation blows up")
    if abs(inp.delta) / inp.H > SMALL_RISE_WARN:
        warnings.warn(f"|delta|/H = {abs(inp.delta) / inp.H:.3g} exceeds the small-rise "
                      f"assumption ({SMALL_RISE_WARN})", RuntimeWarning, stacklevel=3)


def elevation_first_order(inp: BoreInput) -> float:
    _guard(inp)
    return inp.delta / (1.0 - inp.g * inp.H / inp.u**2)


def relation_sides(inp: BoreInput, eps):
    """Left and right sides of the combined energy-continuity relation."""
    H, d, u, g = inp.H, inp.delta, inp.u, inp.g
    lhs = (H * H + 2.0 * H * eps + eps * eps) * 2.0 * g * eps
    rhs = u * u * (2.0 * H + eps + d) * (eps - d)
    return lhs, rhs


def relation_residual(inp: BoreInput, eps):
    lhs, rhs = relation_sides(inp, eps)
    return lhs - rhs


def _relation_derivative(inp: BoreInput, eps):
    H, d, u, g = inp.H, inp.delta, inp.u, inp.g
    dlhs = 2.0 * g * (H + eps) ** 2 + 4.0 * g * eps * (H + eps)
    drhs = u * u * ((eps - d) + (2.0 * H + eps + d))
    return dlhs - drhs


def elevation_exact(inp: BoreInput, rtol: float = 1e-13) -> float:
    """Root of the cubic relation on the branch through ``eps(0) = 0``.

    The bracket is grown symmetrically around the first-order value until
    the residual changes sign, then bisection narrows it and a few Newton
    steps polish the root.
    """
    _guard(inp)
    if inp.delta == 0.0:
        return 0.0
    guess = elevation_first_order(inp)
    limit = 0.5 * inp.H
    f = lambda e: relation_residual(inp, e)

    width = max(abs(guess), abs(inp.delta)) * 1e-3
    lo = hi = None
    while True:
        a, b = max(guess - width, -limit), min(guess + width, limit)
        fa, fb = f(a), f(b)
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if fa * fb < 0:
            lo, hi = a, b
            break
        if a <= -limit and b >= limit:
            raise NoPhysicalRootError(f"no root of the bore relation with |eps| <= H/2 (delta={inp.delta})")
        width *= 2.0

    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo <= 1e-15 * max(abs(mid), 1e-300):
            lo = hi = mid
            break
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    eps = 0.5 * (lo + hi)
    for _ in range(4):
        d = _relation_derivative(inp, eps)
        if d == 0.0:
            break
        step = f(eps) / d
        eps -= step
        if abs(step) <= 1e-17 * max(abs(eps), 1e-300):
            break

    lhs, rhs = relation_sides(inp, eps)
    if abs(lhs - rhs) > rtol * max(abs(lhs), abs(rhs), 1.0):
        raise NoPhysicalRootError(f"root polish failed: residual {abs(lhs - rhs):.3e}")
    return float(eps)

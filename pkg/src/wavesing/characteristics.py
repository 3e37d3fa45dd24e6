"""Characteristics of the one-dimensional shallow-water equations.

Along ``dx/dt = u + c`` the quantity ``u + 2c - m t`` is conserved, along
``dx/dt = u - c`` the quantity ``u - 2c - m t``.  For a horizontal floor and
a piston (the incoming tide) pushing into still water of speed ``c0`` the
forward family reduces to straight lines emitted from the piston path with
slope ``(3/2) u_A(t0) + c0``.  When ``u_A`` increases those lines cross and
their envelope marks the onset of a bore.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError

__all__ = [
    "Family",
    "ShallowState",
    "CharacteristicLine",
    "PistonPath",
    "riemann_invariants",
    "characteristic_speed",
    "emit_characteristics",
    "first_focusing_time",
    "linear_piston_onset",
]


class Family(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class ShallowState:
    """Local state: velocity ``u``, wave speed ``c``, floor slope ``m``, time ``t``."""

    u: float
    c: float
    m: float = 0.0
    t: float = 0.0
    g: float = 9.81

    def __post_init__(self):
        if self.c < 0:
            raise DomainError("propagation speed c must be non-negative")
        if self.g <= 0:
            raise DomainError("gravitational acceleration must be positive")

    @classmethod
    def from_depth(cls, u, eta, h, m=0.0, t=0.0, g=9.81):
        """State with ``c = sqrt(g (eta + h))``."""
        if eta + h < 0:
            raise DomainError("total depth eta + h must be non-negative")
        return cls(u, float(np.sqrt(g * (eta + h))), m, t, g)


def riemann_invariants(s: ShallowState) -> tuple[float, float]:
    """Return ``(xi, sigma) = (u - 2c - m t, u + 2c - m t)``."""
    drift = s.m * s.t
    return s.u - 2.0 * s.c - drift, s.u + 2.0 * s.c - drift


def characteristic_speed(s: ShallowState, family: Family) -> float:
    if family is Family.PLUS:
        return s.u + s.c
    return s.u - s.c


@dataclass(frozen=True)
class CharacteristicLine:
    """Straight forward characteristic ``x(t) = x0 + v (t - t0)`` for ``t >= t0``.

    ``u`` and ``c`` are the constant state carried by the line and
    ``invariant`` the value of ``u + 2c`` (horizontal floor) along it.
    """

    t0: float
    x0: float
    v: float
    invariant: float
    u: float = 0.0
    c: float = 0.0

    def position(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t0):
            raise DomainError("line is only defined for t >= t0")
        return self.x0 + self.v * (t - self.t0)

    def state_at(self, t: float, g: float = 9.81) -> ShallowState:
        if t < self.t0:
            raise DomainError("line is only defined for t >= t0")
        return ShallowState(self.u, self.c, 0.0, t, g)


class PistonPath:
    """Velocity ``u_A(t)`` of the incoming tide at the channel mouth.

    Parameters
    ----------
    velocity : callable
        ``u_A(t)``, vectorised over numpy arrays.
    c0 : float
        Undisturbed propagation speed ``sqrt(g h)``.
    t_max : float, optional
        Right end of the time domain (``inf`` when omitted).
    position : callable, optional
        Closed form for ``int_0^t u_A``; quadrature is used otherwise.
    """

    def __init__(self, velocity: Callable, c0: float, t_max: float = np.inf,
                 position: Callable | None = None):
        if not c0 > 0:
            raise DomainError("c0 must be positive")
        if not np.isfinite(velocity(0.0)):
            raise DomainError("u_A(0) must be finite")
        self.velocity = velocity
        self.c0 = float(c0)
        self.t_max = float(t_max)
        self._position = position

    @classmethod
    def linear(cls, a: float, c0: float, t_max: float = np.inf) -> "PistonPath":
        return cls(lambda t: a * np.asarray(t, dtype=float), c0, t_max)

    @classmethod
    def table(cls, t: Sequence[float], u: Sequence[float], c0: float) -> "PistonPath":
        """Piecewise-linear ``u_A`` through tabulated samples starting at ``t = 0``."""
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        if t.ndim != 1 or t.shape != u.shape or t.size < 2:
            raise DomainError("table needs matching t and u arrays with at least 2 samples")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise DomainError("table times must start at 0 and increase strictly")
        cum = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(t) * (u[1:] + u[:-1]))])

        def position(tq):
            # exact integral of the linear interpolant
            k = np.clip(np.searchsorted(t, tq, side="right") - 1, 0, t.size - 2)
            dt = tq - t[k]
            slope = (u[k + 1] - u[k]) / (t[k + 1] - t[k])
            return cum[k] + u[k] * dt + 0.5 * slope * dt**2

        return cls(lambda tq: np.interp(tq, t, u), c0, t[-1], position)

    def position(self, t: float) -> float:
        """Piston displacement ``int_0^t u_A``."""
        self._check(t)
        if self._position is not None:
            return float(self._position(t))
        val, _ = integrate.quad(self.velocity, 0.0, t, epsabs=1e-10, epsrel=1e-12, limit=200)
        return float(val)

    def _check(self, t):
        if not (0.0 <= t <= self.t_max):
            raise DomainError(f"emission time {t} outside piston domain [0, {self.t_max}]")


def emit_characteristics(path: PistonPath, emission_times: Sequence[float]) -> list[CharacteristicLine]:
    """Forward characteristics leaving the piston at the given times.

    Each line starts at the piston position and travels at
    ``(3/2) u_A(t0) + c0``.  The carried state is the simple-wave state
    ``u = u_A``, ``c = c0 + u_A / 2``.
    """
    times = np.asarray(emission_times, dtype=float)
    if times.ndim != 1:
        raise DomainError("emission_times must be one-dimensional")
    if np.any(np.diff(times) <= 0):
        raise DomainError("emission_times must be strictly increasing")
    lines = []
    for t0 in times:
        path._check(t0)
        ua = float(path.velocity(t0))
        c = path.c0 + 0.5 * ua
        v = 1.5 * ua + path.c0
        lines.append(CharacteristicLine(float(t0), path.position(t0), v, ua + 2.0 * c, ua, c))
    return lines


def _intersection(a: CharacteristicLine, b: CharacteristicLine):
    dv = a.v - b.v
    if dv == 0.0:
        return None
    t = (b.x0 - a.x0 + a.v * a.t0 - b.v * b.t0) / dv
    if t < max(a.t0, b.t0):
        return None
    return t, a.x0 + a.v * (t - a.t0)


def first_focusing_time(lines: Sequence[CharacteristicLine], method: str = "adjacent"):
    """Earliest crossing of two characteristics, or ``None``.

    ``method="adjacent"`` only inspects neighbours in emission order, which
    is where the first crossing happens for a monotone piston velocity.
    ``method="all-pairs"`` checks every pair.
    """
    if len(lines) < 2:
        raise DomainError("need at least two lines")
    ordered = sorted(lines, key=lambda ln: (ln.t0, ln.x0, ln.v))
    if method == "adjacent":
        pairs = zip(ordered[:-1], ordered[1:])
    elif method == "all-pairs":
        pairs = itertools.combinations(ordered, 2)
    else:
        raise ValueError(f"unknown method {method!r}")
    best = None
    for a, b in pairs:
        hit = _intersection(a, b)
        if hit is not None and (best is None or hit[0] < best[0]):
            best = hit
    return best


def linear_piston_onset(a: float, c0: float) -> tuple[float, float]:
    """Envelope onset for ``u_A = a t``: ``t* = 2 c0 / (3a)``, ``x* = c0 t*``."""
    if a <= 0:
        raise DomainError("onset exists only for a > 0")
    t = 2.0 * c0 / (3.0 * a)
    return t, c0 * t

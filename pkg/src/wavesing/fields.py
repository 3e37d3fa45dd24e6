"""Grids, sampled fields, curves and the small numerical kernels shared by
every other module.

Values on a :class:`Grid2D` are stored as arrays of shape ``(ny, nx)``: the
row index runs over ``y`` and the column index over ``x``, so a row-major
flattening visits ``x`` fastest.  Fields are immutable; every operation
returns a new object.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, NumericalInputError

__all__ = [
    "Grid2D",
    "ScalarField2D",
    "ComplexField2D",
    "VectorField2D",
    "ParametricCurve",
    "gradient",
    "laplacian",
    "winding_aware_phase_difference",
    "write_scalar_csv",
    "write_complex_csv",
    "write_vector_csv",
    "read_scalar_csv",
    "read_complex_csv",
    "read_vector_csv",
    "FLOAT_FMT",
]

#: 17 significant digits round-trip every IEEE double.
FLOAT_FMT = "%.17g"


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid with ``nx * ny`` nodes including the edges."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.nx >= 2 and self.ny >= 2):
            raise DomainError(f"grid needs at least 2 nodes per axis, got {self.nx}x{self.ny}")
        if not (np.isfinite([self.x_min, self.x_max, self.y_min, self.y_max]).all()):
            raise DomainError("grid bounds must be finite")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError("grid bounds must satisfy min < max")

    @classmethod
    def square(cls, lo: float, hi: float, n: int) -> "Grid2D":
        return cls(lo, hi, lo, hi, n, n)

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, Y)`` coordinate arrays of shape ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y, indexing="xy")

    def sample(self, func, dtype=float) -> np.ndarray:
        X, Y = self.mesh()
        out = np.asarray(func(X, Y), dtype=dtype)
        return np.broadcast_to(out, self.shape).copy()

    def subgrid_slices(self, other: "Grid2D") -> tuple[slice, slice]:
        """Row/column slices of the nodes of ``self`` covered by ``other``.

        ``other`` must be a node-aligned sub-rectangle of ``self``.
        """
        def axis(lo, hi, origin, h, n):
            i0 = (lo - origin) / h
            i1 = (hi - origin) / h
            j0, j1 = int(round(i0)), int(round(i1))
            if abs(i0 - j0) > 1e-8 or abs(i1 - j1) > 1e-8 or j0 < 0 or j1 > n - 1 or j1 <= j0:
                raise DomainError("sub-rectangle is not aligned with the grid nodes")
            return slice(j0, j1 + 1)

        cols = axis(other.x_min, other.x_max, self.x_min, self.hx, self.nx)
        rows = axis(other.y_min, other.y_max, self.y_min, self.hy, self.ny)
        return rows, cols


def _check_values(grid: Grid2D, values, dtype, name):
    a = np.asarray(values, dtype=dtype)
    if a.ndim == 1:
        if a.size != grid.nx * grid.ny:
            raise NumericalInputError(f"{name} has {a.size} entries, grid needs {grid.nx * grid.ny}")
        a = a.reshape(grid.shape)
    if a.shape != grid.shape:
        raise NumericalInputError(f"{name} has shape {a.shape}, grid shape is {grid.shape}")
    if not np.isfinite(a).all():
        raise NumericalInputError(f"{name} contains non-finite entries")
    return _frozen(a, dtype)


@dataclass(frozen=True, eq=False)
class ScalarField2D:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, float, "values"))

    @classmethod
    def from_function(cls, grid: Grid2D, func) -> "ScalarField2D":
        return cls(grid, grid.sample(func))

    def __add__(self, other):
        return ScalarField2D(self.grid, self.values + _vals(other))

    def __sub__(self, other):
        return ScalarField2D(self.grid, self.values - _vals(other))

    def __mul__(self, other):
        return ScalarField2D(self.grid, self.values * _vals(other))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ComplexField2D:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, complex, "values"))

    @classmethod
    def from_function(cls, grid: Grid2D, func) -> "ComplexField2D":
        return cls(grid, grid.sample(func, dtype=complex))

    def conjugate(self) -> "ComplexField2D":
        return ComplexField2D(self.grid, np.conj(self.values))


@dataclass(frozen=True, eq=False)
class VectorField2D:
    grid: Grid2D
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", _check_values(self.grid, self.u, float, "u"))
        object.__setattr__(self, "v", _check_values(self.grid, self.v, float, "v"))

    @classmethod
    def from_function(cls, grid: Grid2D, func) -> "VectorField2D":
        X, Y = grid.mesh()
        u, v = func(X, Y)
        return cls(grid, np.broadcast_to(u, grid.shape), np.broadcast_to(v, grid.shape))

    @property
    def speed_squared(self) -> np.ndarray:
        return self.u**2 + self.v**2


def _vals(other):
    return other.values if isinstance(other, ScalarField2D) else other


@dataclass(frozen=True, eq=False)
class ParametricCurve:
    """Ordered samples ``(s_i, (X_i, Y_i))`` of a plane curve."""

    parameter: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.parameter, dtype=float)
        p = np.asarray(self.points, dtype=float)
        if s.ndim != 1 or p.shape != (s.size, 2):
            raise NumericalInputError("curve needs parameter (n,) and points (n, 2)")
        if s.size < 3:
            raise NumericalInputError("curve needs at least 3 samples")
        if not np.all(np.diff(s) > 0):
            raise NumericalInputError("curve parameter must be strictly increasing")
        object.__setattr__(self, "parameter", _frozen(s, float))
        object.__setattr__(self, "points", _frozen(p, float))

    def __len__(self):
        return self.parameter.size


def gradient(field: ScalarField2D) -> VectorField2D:
    """Second-order finite-difference gradient.

    Central differences in the interior and second-order one-sided
    differences on the edges, so linear fields are differentiated exactly.
    """
    g = field.grid
    if g.nx < 3 or g.ny < 3:
        raise DomainError("gradient needs at least 3 nodes per axis")
    vals = np.asarray(field.values)
    if not np.isfinite(vals).all():
        raise NumericalInputError("gradient of a non-finite field")
    return VectorField2D(g, _first_derivative(vals, g.hx, 1), _first_derivative(vals, g.hy, 0))


def _first_derivative(a, h, axis):
    # written in differences so constant data gives exactly zero
    a = np.moveaxis(a, axis, 0)
    out = np.empty_like(a)
    out[1:-1] = (a[2:] - a[:-2]) / (2.0 * h)
    d1, d2 = a[1] - a[0], a[2] - a[0]
    out[0] = (4.0 * d1 - d2) / (2.0 * h)
    e1, e2 = a[-1] - a[-2], a[-1] - a[-3]
    out[-1] = (4.0 * e1 - e2) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def _second_derivative(a, h, axis):
    a = np.moveaxis(a, axis, 0)
    out = np.empty_like(a)
    out[1:-1] = (a[2:] - 2.0 * a[1:-1] + a[:-2]) / h**2
    if a.shape[0] >= 4:
        out[0] = (2.0 * a[0] - 5.0 * a[1] + 4.0 * a[2] - a[3]) / h**2
        out[-1] = (2.0 * a[-1] - 5.0 * a[-2] + 4.0 * a[-3] - a[-4]) / h**2
    else:
        out[0] = out[1]
        out[-1] = out[-2]
    return np.moveaxis(out, 0, axis)


def laplacian(field: ScalarField2D) -> ScalarField2D:
    """Five-point Laplacian, second order everywhere (one-sided on edges)."""
    g = field.grid
    if g.nx < 3 or g.ny < 3:
        raise DomainError("laplacian needs at least 3 nodes per axis")
    vals = np.asarray(field.values)
    lap = _second_derivative(vals, g.hx, 1) + _second_derivative(vals, g.hy, 0)
    return ScalarField2D(g, lap)


def winding_aware_phase_difference(chi_a, chi_b):
    """Representative of ``chi_b - chi_a`` in the half-open interval (-pi, pi]."""
    d = np.asarray(chi_b, dtype=float) - np.asarray(chi_a, dtype=float)
    r = np.mod(d + np.pi, 2.0 * np.pi) - np.pi
    r = np.where(r <= -np.pi, r + 2.0 * np.pi, r)
    return float(r) if r.ndim == 0 else r


# --------------------------------------------------------------------------
# CSV serialization

def _rows(grid: Grid2D, *columns):
    X, Y = grid.mesh()
    cols = [X.ravel(), Y.ravel()] + [np.asarray(c).ravel() for c in columns]
    return np.column_stack(cols)


def _write(path, header, data, extra=None):
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for k, row in enumerate(data):
            line = ",".join(FLOAT_FMT % v for v in row)
            if extra is not None:
                line += "," + str(extra[k])
            fh.write(line + "\n")
    return path


def write_scalar_csv(path, field: ScalarField2D):
    return _write(path, ["x", "y", "value"], _rows(field.grid, field.values))


def write_complex_csv(path, field: ComplexField2D, extra_name=None, extra=None):
    header = ["x", "y", "re", "im"] + ([extra_name] if extra_name else [])
    extra = None if extra is None else np.asarray(extra).ravel()
    return _write(path, header, _rows(field.grid, field.values.real, field.values.imag), extra)


def write_vector_csv(path, field: VectorField2D):
    return _write(path, ["x", "y", "u", "v"], _rows(field.grid, field.u, field.v))


def _read(path, expected):
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header[: len(expected)] != expected:
            raise NumericalInputError(f"{path}: expected header {','.join(expected)}, got {','.join(header)}")
        data = np.array([[float(v) for v in row[: len(expected)]] for row in reader if row], dtype=float)
    if data.size == 0:
        raise NumericalInputError(f"{path}: no data rows")
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    if xs.size * ys.size != data.shape[0]:
        raise NumericalInputError(f"{path}: rows do not form a complete rectangular grid")
    grid = Grid2D(xs[0], xs[-1], ys[0], ys[-1], xs.size, ys.size)
    if not (np.allclose(xs, grid.x, rtol=0, atol=1e-9 * max(1.0, np.abs(xs).max()))
            and np.allclose(ys, grid.y, rtol=0, atol=1e-9 * max(1.0, np.abs(ys).max()))):
        raise NumericalInputError(f"{path}: grid spacing is not uniform")
    ix = np.searchsorted(xs, data[:, 0])
    iy = np.searchsorted(ys, data[:, 1])
    cols = []
    for c in range(2, len(expected)):
        a = np.full(grid.shape, np.nan)
        a[iy, ix] = data[:, c]
        cols.append(a)
    return grid, cols


def read_scalar_csv(path) -> ScalarField2D:
    grid, (v,) = _read(path, ["x", "y", "value"])
    return ScalarField2D(grid, v)


def read_complex_csv(path) -> ComplexField2D:
    grid, (re, im) = _read(path, ["x", "y", "re", "im"])
    return ComplexField2D(grid, re + 1j * im)


def read_vector_csv(path) -> VectorField2D:
    grid, (u, v) = _read(path, ["x", "y", "u", "v"])
    return VectorField2D(grid, u, v)

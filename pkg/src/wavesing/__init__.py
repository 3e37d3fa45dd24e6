"""Numerical models of waves near their singularities.

Submodules
----------
fields
    Uniform grids, scalar/complex/vector fields and CSV round trips.
characteristics
    Riemann invariants and piston-driven characteristics of shallow water.
bore
    Froude regimes and the bore elevation over a floor rise.
steady
    Type classification and energy of steady two-dimensional flow.
hodograph
    Sign of the hodograph Jacobian in the elliptic region.
rays
    Ray tracing, the ray-map Jacobian and caustic detection.
caustic_layer
    Airy solver and the uniform field across a fold caustic.
wavefront
    Normal-flow wavefronts and their singular times.
phase
    Phase singularities, winding numbers and cotidal lines.
cli
    Command-line driver.
"""

from . import bore, caustic_layer, characteristics, fields, hodograph, phase, rays, steady, wavefront
from .errors import WaveSingError

__version__ = "0.1.0"

__all__ = [
    "bore",
    "caustic_layer",
    "characteristics",
    "fields",
    "hodograph",
    "phase",
    "rays",
    "steady",
    "wavefront",
    "WaveSingError",
    "__version__",
]

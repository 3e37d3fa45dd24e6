"""Amphidromic points of a synthetic two-constituent tide.

Builds a complex tidal field from harmonic constants, locates its phase
singularities, confirms each charge on a loop and counts cotidal lines.
The singularities of the individual constituents do not survive the sum;
the combined field has zeros of its own.
"""

import numpy as np

from wavesing import phase as ph
from wavesing.fields import Grid2D

CONSTITUENTS = [
    {"amplitude": 1.0, "phase_lag": 0.0,
     "spatial": {"type": "vortex", "center": [-0.8, 0.3], "charge": 1, "width": 3.0}},
    {"amplitude": 0.6, "phase_lag": 1.2,
     "spatial": {"type": "vortex", "center": [0.9, -0.4], "charge": -1, "width": 3.0}},
]


def main():
    grid = Grid2D.square(-2.0, 2.0, 161)
    dec = ph.decompose(ph.harmonic_field(grid, CONSTITUENTS))
    pts = ph.detect_amphidromic(dec)
    print(f"{len(pts)} amphidromic points")
    for p in pts:
        loop = ph.circle_loop(grid, p.position, 0.2)
        print(f"  ({p.position[0]:+.3f}, {p.position[1]:+.3f}) charge {p.charge:+d}, "
              f"loop winding {ph.winding_number(dec, loop):+d}, amplitude {p.amplitude:.2e}")
    total = ph.winding_number(dec, ph.boundary_loop(grid))
    print(f"boundary winding {total:+d}, sum of charges {sum(p.charge for p in pts):+d}")
    phases = list(np.linspace(-np.pi, np.pi, 13)[1:])
    lines = ph.cotidal_lines(dec, phases)
    print(f"{len(lines)} cotidal line segments for {len(phases)} phases")


if __name__ == "__main__":
    main()

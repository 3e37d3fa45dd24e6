"""Field across a straight fold caustic: uniform Airy layer against two-ray optics.

Prints the uniform amplitude, the geometrical-optics amplitude and their
gap at a few distances from the caustic.
"""

import argparse

import numpy as np

from wavesing import caustic_layer as cl
from wavesing.fields import Grid2D


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=100.0)
    args = ap.parse_args()

    k = args.k
    grid = Grid2D(-0.1, 0.1, -0.2, 1.0, 3, 1201)
    an = cl.canonical_fold_ansatz(grid, k)
    t = k ** (2 / 3) * an.rho.values
    airy = cl.canonical_airy(float(t.min()) - 1, float(t.max()) + 1)
    u = cl.evaluate_uniform_field(an, airy).values[:, 1]
    go, scale = cl.geometric_optics_field(an)
    y = grid.y
    print(f"k = {k:g}, Airy residual {airy.max_residual():.1e}")
    print(f"{'y':>8} {'k^(2/3) rho':>12} {'uniform':>12} {'two-ray':>12} {'gap/scale':>10}")
    for target in (-0.2, -0.05, 0.0, 0.01, 0.05, 0.2, 0.5, 1.0):
        i = int(np.argmin(np.abs(y - target)))
        g = go.values[i, 1]
        sc = scale.values[i, 1]
        gap = f"{abs(u[i] - g) / sc:10.2e}" if sc > 0 else f"{'-':>10}"
        print(f"{y[i]:8.3f} {t[i, 1]:12.3f} {u[i].real:12.6f} {g.real:12.6f} {gap}")


if __name__ == "__main__":
    main()

"""Catacaustic of a circular mirror lit by parallel rays.

Traces a fan reflected by the unit circle, detects the caustic and compares
it with the nephroid.  Writes ``nephroid.csv`` when ``--out`` is given.

    python3 demos/nephroid.py --rays 4000 --out runs/
"""

import argparse
from pathlib import Path

import numpy as np

from wavesing import rays as ry


def nephroid(phi):
    return np.column_stack([(3 * np.sin(phi) - np.sin(3 * phi)) / 4,
                            -(3 * np.cos(phi) - np.cos(3 * phi)) / 4])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rays", type=int, default=4000)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    xi = np.linspace(-0.99, 0.99, args.rays)
    pos, mom = ry.parallel_launch(xi, (0.0, -1.0))
    fan = ry.trace_fan(xi, pos, mom, ry.MediumSpec.homogeneous(), 1.6, 0.02, mirror=ry.CircularMirror())
    pts = ry.detect_caustic(fan)
    P = np.array([p.position for p in pts])
    err = np.hypot(*(P - nephroid(np.arcsin([p.xi for p in pts]))).T)
    print(f"{len(pts)} caustic points from {args.rays} rays")
    print(f"max distance from the nephroid: {err.max():.2e}")
    for p in pts:
        if p.type is not ry.CausticType.FOLD:
            print(f"{p.type.value} at ({p.position[0]:+.8f}, {p.position[1]:+.8f})")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        np.savetxt(args.out / "nephroid.csv", np.c_[P, err], delimiter=",", header="x,y,error",
                   comments="", fmt="%.17g")


if __name__ == "__main__":
    main()

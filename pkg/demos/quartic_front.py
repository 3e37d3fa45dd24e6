"""Wavefronts leaving the curve y = x^4.

Prints the focusing time at a few points, the first time the front
develops a cusp, and the number of self-intersections as the front grows
its swallowtail.
"""

import numpy as np

from wavesing import wavefront as wf


def main():
    src = wf.SourceCurve.quartic()
    xs = np.array([0.2, 0.5, 1.0, 1.5, 2.0])
    for s, t in wf.singular_times(src, wf.Direction.PLUS, xs):
        print(f"x = {s:4.2f}: front is singular at t = {t:.10f}")
    print(f"toward the convex side: {len(wf.singular_times(src, wf.Direction.MINUS, xs))} singular times")
    s, t = wf.first_singular_time(src, wf.Direction.PLUS)
    print(f"first singular time t = {t:.8f} at x = {s:+.8f}")
    for t in (0.3, 0.5, 1.0, 2.0, 3.0):
        front = wf.evolve(src, t, wf.Direction.PLUS, 801)
        print(f"t = {t:3.1f}: {len(wf.self_intersections(front))} self-intersections")


if __name__ == "__main__":
    main()

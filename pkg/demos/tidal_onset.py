"""Tide entering a channel: focusing of characteristics and the bore over a floor step.

Part one emits characteristics from a steadily accelerating mouth
velocity and compares the first crossing with the envelope onset.  Part two
tabulates the surface elevation over a small floor rise.
"""

import numpy as np

from wavesing import bore as bm
from wavesing import characteristics as ch


def main():
    a, c0 = 0.5, 1.0
    t_star, x_star = ch.linear_piston_onset(a, c0)
    print(f"envelope onset t* = {t_star:.6f}, x* = {x_star:.6f}")
    for n in (21, 81, 321, 1281):
        lines = ch.emit_characteristics(ch.PistonPath.linear(a, c0), np.linspace(0, 2, n))
        t, x = ch.first_focusing_time(lines)
        print(f"  {n:5d} lines: first crossing t = {t:.6f}, x = {x:.6f}")

    print("\nbore over a floor rise, H = 1, g = 9.81")
    print(f"{'u':>6} {'F':>7} {'regime':>10} {'delta':>8} {'first order':>13} {'exact':>13}")
    for u in (0.5, 2.0, 5.0):
        for delta in (0.01, 0.05):
            inp = bm.BoreInput(1.0, delta, u, 9.81)
            reg = bm.froude(u, inp.c)
            print(f"{u:6.2f} {reg.froude:7.3f} {reg.tag.value:>10} {delta:8.3f} "
                  f"{bm.elevation_first_order(inp):13.6e} {bm.elevation_exact(inp):13.6e}")


if __name__ == "__main__":
    main()

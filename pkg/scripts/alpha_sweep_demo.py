#!/usr/bin/env python3
"""Approximate-identity demonstration: L1 distances of both operator
kinds from their small-alpha limits, for a few catalog functions.

    python3 scripts/alpha_sweep_demo.py
"""

import numpy as np

from fracalc.funcspec import Grid, Interval, Poly, Sin, sample_spec
from fracalc.operators import OperatorParams, Side, apply_j, apply_s, running_integral

UNIT = Interval(0.0, 1.0)
LADDER = (0.4, 0.2, 0.1, 0.05, 0.025)


def main() -> None:
    n = 2000
    spacing = UNIT.width / n
    for label, spec in (("sin 3x", Sin(3.0)), ("x - x^2", Poly((0.0, 1.0, -1.0)))):
        g = Grid(sample_spec(spec, UNIT, n))
        ri = running_integral(g, UNIT, Side.LEFT, n)
        print(f"f(x) = {label}")
        print(f"  {'alpha':>8s} {'|Jf - f|_1':>12s} {'|Sf - If|_1':>12s}")
        for alpha in LADDER:
            p = OperatorParams(Side.LEFT, alpha, UNIT)
            jv = apply_j(g, p, n).outputs.values
            sv = apply_s(g, p, n).outputs.values
            jd = np.trapezoid(np.abs(jv - g.fn.values), dx=spacing)
            sd = np.trapezoid(np.abs(sv - ri.values), dx=spacing)
            print(f"  {alpha:8.3f} {jd:12.6f} {sd:12.6f}")
        print()


if __name__ == "__main__":
    main()

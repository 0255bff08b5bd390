#!/usr/bin/env python3
"""Solve a sample relaxation problem and print convergence diagnostics.

    python3 scripts/relaxation_demo.py [alpha] [lambda]

Writes the solution to relaxation_solution.csv in the working directory.
"""

import sys

import numpy as np

from fracalc.funcspec import GridFunction, Sin
from fracalc.relaxation import (
    Autonomous,
    RelaxationProblem,
    TIME_DOMAIN,
    contraction_constant,
    solve_picard,
    write_solution_csv,
)


def main() -> None:
    alpha = float(sys.argv[1]) if len(sys.argv) > 1 else 0.25
    lam = float(sys.argv[2]) if len(sys.argv) > 2 else 0.5
    kappa = contraction_constant(alpha, lam, 0.0)
    print(f"alpha={alpha}  lambda={lam}  contraction constant kappa={kappa:.6f}")
    if kappa >= 1.0:
        print("warning: kappa >= 1, Picard convergence is not guaranteed")

    prob = RelaxationProblem(alpha=alpha, lam=lam, rhs=Autonomous(Sin(1.0)))
    u0 = GridFunction(TIME_DOMAIN, np.zeros(prob.grid_n + 1))
    u, diag = solve_picard(prob, u0)

    print(f"iterations: {diag.iterations}  converged: {diag.converged}")
    for i, c in enumerate(diag.sup_changes, start=1):
        print(f"  sweep {i:3d}: sup change {c:.3e}")
    write_solution_csv("relaxation_solution.csv", u)
    print("solution written to relaxation_solution.csv")


if __name__ == "__main__":
    main()

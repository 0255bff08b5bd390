"""Picard solver for the fractional relaxation equation on [0, 1].

The problem  D^alpha u + lambda u = f(t, u),  (J^alpha u)(0) = 0  is
equivalent to the fixed point  u = T(-lambda u + f(., u))  where T is the
left second-kind integral on [0, 1] (value 0 at t = 0).  Under the
Lipschitz assumption the map contracts with constant

    kappa = alpha (lambda + C_f) Q(1/alpha),

and Picard iteration converges geometrically; when kappa >= 1 the solver
still iterates but flags that the contraction guarantee is void.

T is applied through exact product integration of the piecewise-linear
iterate against the kernel moments (same machinery as the second-kind
operator), which makes each sweep a single Toeplitz convolution.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .funcspec import FunctionSpec, Grid, GridFunction, Interval, parse_spec, render_spec, eval_spec_array
from .operators import OperatorParams, Side, apply_s
from .special import Accuracy, DEFAULT_ACCURACY, s_cumulative

TIME_DOMAIN = Interval(0.0, 1.0)


@dataclass(frozen=True)
class Autonomous:
    """Right-hand side f(t, u) = g(t); Lipschitz constant 0."""

    g: FunctionSpec


@dataclass(frozen=True)
class Affine:
    """Right-hand side f(t, u) = g(t) + c u; Lipschitz constant |c|."""

    g: FunctionSpec
    c: float


RhsSpec = Union[Autonomous, Affine]


@dataclass(frozen=True)
class RelaxationProblem:
    alpha: float
    lam: float
    rhs: RhsSpec
    lipschitz_cf: float = 0.0
    grid_n: int = 256
    tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.lam > 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.grid_n < 16:
            raise ValueError(f"grid_n must be at least 16, got {self.grid_n}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {self.max_iter}")
        if isinstance(self.rhs, Affine):
            if self.lipschitz_cf < abs(self.rhs.c):
                raise ValueError(
                    f"lipschitz_cf={self.lipschitz_cf} is below |c|={abs(self.rhs.c)}"
                )
        elif self.lipschitz_cf != 0.0:
            raise ValueError("autonomous right-hand sides have lipschitz_cf = 0")

    def rhs_values(self, t: np.ndarray, u: np.ndarray) -> np.ndarray:
        if isinstance(self.rhs, Autonomous):
            return eval_spec_array(self.rhs.g, t, TIME_DOMAIN, self.alpha)
        return (eval_spec_array(self.rhs.g, t, TIME_DOMAIN, self.alpha)
                + self.rhs.c * u)


@dataclass
class SolveDiagnostics:
    iterations: int
    sup_changes: list[float]
    kappa: float
    converged: bool
    contraction_warning: bool = False


def contraction_constant(alpha: float, lam: float, cf: float,
                         acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """kappa = alpha (lambda + cf) Q(1/alpha); contraction when < 1."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if lam < 0.0 or cf < 0.0:
        raise ValueError("lambda and cf must be nonnegative")
    return alpha * (lam + cf) * s_cumulative(1.0 / alpha, acc)


def apply_t(h: GridFunction, alpha: float,
            acc: Accuracy = DEFAULT_ACCURACY) -> GridFunction:
    """The solution operator T: left second-kind integral on [0, 1],
    pinned to 0 at t = 0."""
    if h.interval != TIME_DOMAIN:
        raise ValueError("apply_t expects a grid on [0, 1]")
    p = OperatorParams(Side.LEFT, alpha, TIME_DOMAIN, acc)
    out = apply_s(Grid(h), p, h.n).outputs
    out.values[0] = 0.0
    return out


def discrete_oscillation(g: GridFunction) -> float:
    """max |g_{i+1} - g_i|; the grid-level modulus-of-continuity probe."""
    return float(np.max(np.abs(np.diff(g.values))))


def solve_picard(prob: RelaxationProblem,
                 u0: GridFunction) -> tuple[GridFunction, SolveDiagnostics]:
    """Picard iteration u_{n+1} = T(-lambda u_n + f(., u_n)) from u0.

    Stops when the sup change drops below prob.tol; if kappa >= 1 the
    contraction guarantee does not apply and the diagnostics carry a
    warning instead of a convergence claim by contraction.
    """
    if u0.interval != TIME_DOMAIN or u0.n != prob.grid_n:
        raise ValueError(
            f"u0 must live on [0, 1] with grid_n={prob.grid_n} intervals"
        )
    kappa = contraction_constant(prob.alpha, prob.lam, prob.lipschitz_cf)
    warning = kappa >= 1.0
    t = u0.nodes()
    u = u0.values.copy()
    sup_changes: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, prob.max_iter + 1):
        h = GridFunction(TIME_DOMAIN, -prob.lam * u + prob.rhs_values(t, u))
        u_next = apply_t(h, prob.alpha).values
        change = float(np.max(np.abs(u_next - u)))
        sup_changes.append(change)
        u = u_next
        if change < prob.tol:
            converged = True
            break
    return (GridFunction(TIME_DOMAIN, u),
            SolveDiagnostics(iterations, sup_changes, kappa, converged,
                             warning))


# ---------------------------------------------------------------------------
# JSON problem documents and CSV/JSON outputs
# ---------------------------------------------------------------------------

def problem_from_json(path: str | Path) -> RelaxationProblem:
    """Load a problem document:

    {"alpha": 0.25, "lambda": 0.5,
     "rhs": {"type": "autonomous", "g": "sin:1"}
            | {"type": "affine", "g": "const:1", "c": -0.2},
     "lipschitz_cf": 0.2, "grid_n": 256, "tol": 1e-8, "max_iter": 200}
    """
    with open(path) as fh:
        doc = json.load(fh)
    rhs_doc = doc["rhs"]
    kind = rhs_doc["type"]
    g = parse_spec(rhs_doc["g"])
    if kind == "autonomous":
        rhs: RhsSpec = Autonomous(g)
    elif kind == "affine":
        rhs = Affine(g, float(rhs_doc["c"]))
    else:
        raise ValueError(f"unknown rhs type {kind!r}")
    return RelaxationProblem(
        alpha=float(doc["alpha"]),
        lam=float(doc["lambda"]),
        rhs=rhs,
        lipschitz_cf=float(doc.get("lipschitz_cf",
                                   abs(rhs.c) if isinstance(rhs, Affine) else 0.0)),
        grid_n=int(doc.get("grid_n", 256)),
        tol=float(doc.get("tol", 1e-8)),
        max_iter=int(doc.get("max_iter", 200)),
    )


def problem_to_json(prob: RelaxationProblem) -> dict:
    if isinstance(prob.rhs, Autonomous):
        rhs_doc = {"type": "autonomous", "g": render_spec(prob.rhs.g)}
    else:
        rhs_doc = {"type": "affine", "g": render_spec(prob.rhs.g), "c": prob.rhs.c}
    return {
        "alpha": prob.alpha,
        "lambda": prob.lam,
        "rhs": rhs_doc,
        "lipschitz_cf": prob.lipschitz_cf,
        "grid_n": prob.grid_n,
        "tol": prob.tol,
        "max_iter": prob.max_iter,
    }


def write_solution_csv(path: str | Path, u: GridFunction) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "u"])
        for t, v in zip(u.nodes(), u.values):
            w.writerow([f"{t:.15g}", f"{v:.15g}"])


def diagnostics_to_json(d: SolveDiagnostics) -> dict:
    return {
        "iterations": d.iterations,
        "kappa": d.kappa,
        "sup_changes": d.sup_changes,
        "converged": d.converged,
        "warning": d.contraction_warning,
    }

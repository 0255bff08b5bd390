"""Relaxation solver: contraction constant, solution operator, Picard
iteration, and the JSON/CSV interfaces."""

import json
import math

import numpy as np
import pytest

from fracalc.funcspec import Const, Cos, Grid, GridFunction, Sin, sample_spec
from fracalc.operators import OperatorParams, Side, apply_j
from fracalc.relaxation import (
    Affine,
    Autonomous,
    RelaxationProblem,
    TIME_DOMAIN,
    apply_t,
    contraction_constant,
    diagnostics_to_json,
    discrete_oscillation,
    problem_from_json,
    problem_to_json,
    solve_picard,
    write_solution_csv,
)
from fracalc.special import s_cumulative

# frozen from the independent cumulative-route oracle at X = 2
ORACLE_HALF_Q2 = 0.5 * 2.4961079000460478


def zeros(n=256):
    return GridFunction(TIME_DOMAIN, np.zeros(n + 1))


class TestContractionConstant:
    def test_zero_rates(self):
        assert contraction_constant(0.7, 0.0, 0.0) == 0.0

    def test_increasing_in_lambda(self):
        vals = [contraction_constant(0.5, lam, 0.0) for lam in (0.5, 1.0, 2.0)]
        assert vals[0] < vals[1] < vals[2]

    def test_reference_value(self):
        assert contraction_constant(0.5, 1.0, 0.0) == pytest.approx(
            ORACLE_HALF_Q2, abs=1e-8)

    def test_domain(self):
        with pytest.raises(ValueError):
            contraction_constant(-0.5, 1.0, 0.0)
        with pytest.raises(ValueError):
            contraction_constant(0.5, -1.0, 0.0)


class TestSolutionOperator:
    def test_zero_input(self):
        out = apply_t(zeros(64), 0.5)
        assert np.max(np.abs(out.values)) == 0.0

    def test_constant_input_closed_form(self):
        h = GridFunction(TIME_DOMAIN, np.full(257, 3.0))
        out = apply_t(h, 0.5)
        ts = out.nodes()
        expect = np.array([0.5 * 3.0 * s_cumulative(t / 0.5) if t > 0 else 0.0
                           for t in ts])
        assert np.max(np.abs(out.values - expect)) < 1e-6

    def test_pinned_at_zero(self):
        h = GridFunction(TIME_DOMAIN, np.random.default_rng(7).normal(size=65))
        out = apply_t(h, 0.3)
        assert out.values[0] == 0.0

    def test_continuity_bound(self):
        # discrete oscillation bounded by the modulus-of-continuity bound:
        # osc(Th) <= omega(step, h) * alpha * Q(1/alpha) + |h|_inf * max cell mass
        alpha = 0.3
        h = sample_spec(Sin(3.0), TIME_DOMAIN, 256)
        out = apply_t(h, alpha)
        omega = discrete_oscillation(h)
        hinf = float(np.max(np.abs(h.values)))
        cap = alpha * s_cumulative(1.0 / alpha)
        step_mass = alpha * s_cumulative(h.spacing / alpha)
        assert discrete_oscillation(out) <= omega * cap + hinf * step_mass + 1e-12

    def test_rejects_wrong_domain(self):
        from fracalc.funcspec import Interval
        g = GridFunction(Interval(0.0, 2.0), np.zeros(65))
        with pytest.raises(ValueError):
            apply_t(g, 0.5)


class TestPicard:
    def test_zero_forcing_fixed_point(self):
        prob = RelaxationProblem(alpha=0.5, lam=1.0, rhs=Autonomous(Const(0.0)))
        u, diag = solve_picard(prob, zeros())
        assert np.max(np.abs(u.values)) == 0.0
        assert diag.iterations == 1
        assert diag.converged

    def test_manufactured_solution(self):
        alpha, lam = 0.25, 0.5
        hstar = sample_spec(Cos(1.0), TIME_DOMAIN, 256)
        ustar = apply_t(hstar, alpha)
        g = GridFunction(TIME_DOMAIN, hstar.values + lam * ustar.values)
        prob = RelaxationProblem(alpha=alpha, lam=lam,
                                 rhs=Autonomous(Grid(g)))
        u, diag = solve_picard(prob, zeros())
        assert diag.converged
        assert not diag.contraction_warning
        assert np.max(np.abs(u.values - ustar.values)) < 1e-4

    def test_geometric_decay(self):
        prob = RelaxationProblem(alpha=0.25, lam=0.5,
                                 rhs=Autonomous(Sin(1.0)))
        u, diag = solve_picard(prob, zeros())
        assert diag.kappa < 1.0
        changes = diag.sup_changes
        for a, b in zip(changes[1:-1], changes[2:]):
            assert b / a <= diag.kappa + 0.05

    def test_fixed_point_residual(self):
        prob = RelaxationProblem(alpha=0.25, lam=0.5,
                                 rhs=Autonomous(Sin(1.0)))
        u, diag = solve_picard(prob, zeros())
        t = u.nodes()
        h = GridFunction(TIME_DOMAIN, -prob.lam * u.values
                         + prob.rhs_values(t, u.values))
        again = apply_t(h, prob.alpha)
        assert np.max(np.abs(u.values - again.values)) < 2.0 * prob.tol

    def test_initial_condition_reconstruction(self):
        # the first-kind integral of the solution equals the running
        # integral of the forcing, and vanishes at t = 0
        prob = RelaxationProblem(alpha=0.25, lam=0.5,
                                 rhs=Autonomous(Sin(1.0)))
        u, _ = solve_picard(prob, zeros())
        t = u.nodes()
        h = -prob.lam * u.values + prob.rhs_values(t, u.values)
        p = OperatorParams(Side.LEFT, prob.alpha, TIME_DOMAIN)
        ju = apply_j(Grid(u), p, prob.grid_n).outputs.values
        running = np.concatenate(
            [[0.0], np.cumsum(0.5 * (h[1:] + h[:-1]) * u.spacing)])
        assert abs(ju[0]) < 1e-12
        assert np.max(np.abs(ju - running)) < 1e-3

    def test_two_starts_agree(self):
        prob = RelaxationProblem(alpha=0.25, lam=0.5,
                                 rhs=Autonomous(Sin(1.0)))
        u_a, diag = solve_picard(prob, zeros())
        const_start = GridFunction(TIME_DOMAIN, np.ones(257))
        u_b, _ = solve_picard(prob, const_start)
        assert diag.kappa < 1.0
        assert np.max(np.abs(u_a.values - u_b.values)) < 3.0 * prob.tol

    def test_forcing_superposition(self):
        kw = dict(alpha=0.25, lam=0.5)
        pa = RelaxationProblem(rhs=Autonomous(Sin(1.0)), **kw)
        pb = RelaxationProblem(rhs=Autonomous(Const(0.3)), **kw)
        gsum = GridFunction(
            TIME_DOMAIN,
            sample_spec(Sin(1.0), TIME_DOMAIN, 256).values + 0.3)
        pc = RelaxationProblem(rhs=Autonomous(Grid(gsum)), **kw)
        ua, _ = solve_picard(pa, zeros())
        ub, _ = solve_picard(pb, zeros())
        uc, _ = solve_picard(pc, zeros())
        assert np.max(np.abs(uc.values - ua.values - ub.values)) < 5.0 * pa.tol

    def test_affine_rhs(self):
        prob = RelaxationProblem(alpha=0.25, lam=0.4,
                                 rhs=Affine(Const(1.0), -0.2),
                                 lipschitz_cf=0.2)
        u, diag = solve_picard(prob, zeros())
        assert diag.converged
        assert diag.kappa < 1.0

    def test_supercritical_warns_but_runs(self):
        prob = RelaxationProblem(alpha=0.5, lam=2.0,
                                 rhs=Autonomous(Const(1.0)), max_iter=5,
                                 tol=1e-12)
        u, diag = solve_picard(prob, zeros())
        assert diag.contraction_warning
        assert diag.kappa >= 1.0

    def test_max_iter_exhaustion(self):
        prob = RelaxationProblem(alpha=0.25, lam=0.5,
                                 rhs=Autonomous(Sin(1.0)), max_iter=2,
                                 tol=1e-14)
        u, diag = solve_picard(prob, zeros())
        assert not diag.converged
        assert diag.iterations == 2

    def test_u0_shape_guard(self):
        prob = RelaxationProblem(alpha=0.25, lam=0.5,
                                 rhs=Autonomous(Const(0.0)))
        with pytest.raises(ValueError):
            solve_picard(prob, zeros(64))


class TestProblemValidation:
    def test_affine_needs_consistent_cf(self):
        with pytest.raises(ValueError):
            RelaxationProblem(alpha=0.5, lam=1.0,
                              rhs=Affine(Const(1.0), -0.5),
                              lipschitz_cf=0.1)

    def test_autonomous_cf_must_be_zero(self):
        with pytest.raises(ValueError):
            RelaxationProblem(alpha=0.5, lam=1.0,
                              rhs=Autonomous(Const(1.0)), lipschitz_cf=0.3)

    def test_grid_floor(self):
        with pytest.raises(ValueError):
            RelaxationProblem(alpha=0.5, lam=1.0,
                              rhs=Autonomous(Const(0.0)), grid_n=8)


class TestInterfaces:
    def test_json_round_trip(self, tmp_path):
        prob = RelaxationProblem(alpha=0.3, lam=0.7,
                                 rhs=Affine(Sin(2.0), -0.1),
                                 lipschitz_cf=0.1, grid_n=64, tol=1e-9,
                                 max_iter=50)
        path = tmp_path / "p.json"
        path.write_text(json.dumps(problem_to_json(prob)))
        back = problem_from_json(path)
        assert back == prob

    def test_solution_csv(self, tmp_path):
        u = GridFunction(TIME_DOMAIN, np.linspace(0.0, 1.0, 65))
        path = tmp_path / "u.csv"
        write_solution_csv(path, u)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t,u"
        assert len(lines) == 66

    def test_diagnostics_json_fields(self):
        prob = RelaxationProblem(alpha=0.25, lam=0.5,
                                 rhs=Autonomous(Const(0.0)))
        _, diag = solve_picard(prob, zeros())
        doc = diagnostics_to_json(diag)
        assert set(doc) == {"iterations", "kappa", "sup_changes",
                            "converged", "warning"}

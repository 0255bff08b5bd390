"""Derivative routes, inversion/correction identities, and the
integration-by-parts rule."""

import math

import numpy as np
import pytest

from fracalc.derivatives import (
    AcFunction,
    check_inversion_ds,
    d_frac_ac,
    d_frac_numeric,
    katr_residual,
    parts_fractional,
    write_residuals_csv,
)
from fracalc.funcspec import (
    Const,
    Cos,
    Grid,
    GridFunction,
    Interval,
    Poly,
    PowShiftLeft,
    Sin,
    sample_spec,
)
from fracalc.operators import OperatorParams, Side, apply_j, j_closed_constant
from fracalc.special import e1_array

UNIT = Interval(0.0, 1.0)


def left(alpha):
    return OperatorParams(Side.LEFT, alpha, UNIT)


def right(alpha):
    return OperatorParams(Side.RIGHT, alpha, UNIT)


class TestAcRepresentation:
    def test_constant_kernel_term(self):
        p = left(0.4)
        ac = AcFunction.from_catalog(Const(2.0), UNIT)
        rep = d_frac_ac(ac, p, 16)
        xs = rep.outputs.nodes()
        expect = 2.0 * e1_array(xs / 0.4) / 0.4
        assert np.max(np.abs(rep.outputs.values - expect)) < 1e-9

    def test_powshift_reduces_to_constant_closed_form(self):
        # f(x) = x - a has f(a) = 0 and f' = 1
        p = left(0.4)
        ac = AcFunction.from_catalog(PowShiftLeft(1), UNIT)
        assert ac.boundary_value == 0.0
        rep = d_frac_ac(ac, p, 16)
        ref = [j_closed_constant(1.0, p, float(x))
               for x in rep.outputs.nodes()]
        assert np.max(np.abs(rep.outputs.values - ref)) < 1e-8

    def test_right_side_sign(self):
        p = right(0.5)
        ac = AcFunction.from_catalog(Const(1.0), UNIT, Side.RIGHT)
        rep = d_frac_ac(ac, p, 16)
        xs = rep.outputs.nodes()
        expect = -e1_array((1.0 - xs) / 0.5) / 0.5
        assert np.max(np.abs(rep.outputs.values - expect)) < 1e-9

    def test_endpoint_guard(self):
        ac = AcFunction.from_catalog(Const(1.0), UNIT)
        with pytest.raises(ValueError):
            d_frac_ac(ac, left(0.5), 16, include_endpoint=True)

    def test_validation_rejects_wrong_derivative(self):
        bad = AcFunction(Sin(1.0), Cos(2.0), 0.0)
        with pytest.raises(ValueError):
            bad.validate(UNIT)

    def test_ac_and_numeric_routes_agree(self):
        # zero boundary value: both derivative routes must coincide
        p = left(0.4)
        f = Poly((0.0, 1.0, 1.0))  # x + x^2, vanishes at the anchor
        ac = AcFunction.from_catalog(f, UNIT)
        assert ac.boundary_value == 0.0
        g = sample_spec(f, UNIT, 1024)
        dnum = d_frac_numeric(g, p)
        nodes = dnum.nodes()
        # near the anchor the difference quotient meets the kernel's
        # unbounded curvature; the comparison is an interior-point one
        keep = (nodes >= 0.1) & (nodes <= 0.9)
        rep = d_frac_ac(ac, p, 62)
        ac_on = rep.outputs(nodes[keep])
        h = 1.0 / 4096
        assert np.max(np.abs(ac_on - dnum.values[keep])) < max(1e-3, 10 * h * h)

    def test_convergence_to_classical_derivative(self):
        # zero boundary value: L1 distance of the fractional derivative
        # from the classical one shrinks with ratio <= 0.9
        n = 1024
        spacing = 1.0 / n
        target = sample_spec(Sin(1.0), UNIT, n)
        norms = []
        for alpha in (0.2, 0.1, 0.05):
            rep = apply_j(Grid(target), left(alpha), n)
            norms.append(float(np.trapezoid(
                np.abs(rep.outputs.values - target.values), dx=spacing)))
        assert norms[1] / norms[0] <= 0.9
        assert norms[2] / norms[1] <= 0.9


class TestNumericRoute:
    def test_matches_kernel_term_for_constant(self):
        p = left(0.4)
        g = sample_spec(Const(1.0), UNIT, 512)
        dnum = d_frac_numeric(g, p)
        nodes = dnum.nodes()
        keep = (nodes >= 0.1) & (nodes <= 0.9)
        expect = e1_array(nodes[keep] / 0.4) / 0.4
        h = 1.0 / 4096
        scale = float(np.max(np.abs(expect)))
        assert np.max(np.abs(dnum.values[keep] - expect)) < max(
            1e-4, h * h * scale)

    def test_zero_input(self):
        g = sample_spec(Const(0.0), UNIT, 64)
        dnum = d_frac_numeric(g, left(0.7))
        assert np.max(np.abs(dnum.values)) == 0.0

    def test_step_guard(self):
        g = sample_spec(Sin(1.0), UNIT, 16)
        with pytest.raises(ValueError):
            d_frac_numeric(g, left(0.5), h=0.5)

    def test_recovers_integrand_of_second_kind(self):
        rep = check_inversion_ds(Sin(1.0), left(0.5))
        assert rep.residual < 1e-3


class TestInversion:
    @pytest.mark.parametrize("alpha", [0.2, 0.5])
    @pytest.mark.parametrize("name,phi", [
        ("const", Const(1.0)),
        ("sin", Sin(2.0)),
        ("poly", Poly((1.0, 0.0, 1.0))),
    ])
    def test_left_recovers_phi(self, alpha, name, phi):
        rep = check_inversion_ds(phi, left(alpha))
        assert rep.passed, f"{name}: residual {rep.residual}"

    def test_right_recovers_minus_phi(self):
        rep = check_inversion_ds(Sin(2.0), right(0.5))
        assert rep.residual < 1e-3

    def test_zero_input_noise_floor(self):
        rep = check_inversion_ds(Const(0.0), left(0.5))
        assert rep.residual < 1e-9

    def test_residual_csv(self, tmp_path):
        rows = [check_inversion_ds(Const(1.0), left(0.5))]
        path = tmp_path / "res.csv"
        write_residuals_csv(path, rows)
        text = path.read_text()
        assert text.startswith("check,side,alpha,residual,tolerance,pass")
        assert ",true" in text


class TestCorrectionIdentity:
    def test_constant_left(self):
        rep = katr_residual(Const(1.0), left(0.5))
        assert rep.passed

    def test_constant_right(self):
        rep = katr_residual(Const(1.5), right(0.5))
        assert rep.passed

    def test_zero_function(self):
        rep = katr_residual(Const(0.0), left(0.3))
        assert rep.residual < 1e-9

    def test_affine_poly(self):
        rep = katr_residual(Poly((1.0, 1.0)), left(0.4))
        assert rep.residual < 1e-3

    def test_rejects_unbounded(self):
        from fracalc.funcspec import E1KernelLeft
        with pytest.raises(ValueError):
            katr_residual(E1KernelLeft(), left(0.5))


class TestPartsRule:
    def test_constants(self):
        lhs, rhs = parts_fractional(Const(1.0), Const(1.0), left(0.3))
        assert abs(lhs - rhs) / abs(lhs) < 1e-5

    def test_zero_rhs_argument(self):
        lhs, rhs = parts_fractional(Const(1.0), Const(0.0), left(0.3))
        assert abs(lhs) < 1e-12
        assert abs(rhs) < 1e-12

    def test_sine_times_identity(self):
        lhs, rhs = parts_fractional(Sin(1.0), Poly((0.0, 1.0)), left(0.3))
        assert abs(lhs - rhs) / abs(lhs) < 1e-4

"""Special-function evaluations against frozen oracle values and
classical identities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracalc.special import (
    Accuracy,
    CONSTANTS,
    EULER_GAMMA,
    e1,
    e1_array,
    e1_moment,
    ek,
    e1_s_convolution,
    log_gamma,
    log_gamma_array,
    p_regularized,
    p_regularized_array,
    s_cumulative,
    s_first_moment,
    volterra_s,
    volterra_s_array,
    _e1_series,
    _e1_confrac,
)

# frozen from the dual-route refinement oracle (power series vs Lentz)
E1_AT_1 = 0.21938393439552029
E1_AT_10 = 4.156968929685325e-06

# frozen from the nested-refinement oracle at target 1e-12
S_AT_1 = 1.0329209475752628
S_AT_HALF = 1.1091030263630675
S_AT_2 = 1.0056557399686876

# frozen segment integrals of the kernel (graded Simpson, log substitution)
SEG_BELOW = 1e-3
SEG_FROZEN = {0.5: 0.7975419470685482, 1.0: 1.3282468082733068,
              2.0: 2.343150903427683}

# independent cumulative-route ladder; sup sits at alpha = 1
AUX_BOUND = 1.4813


class TestE1:
    def test_value_at_one(self):
        assert e1(1.0) == pytest.approx(E1_AT_1, abs=5e-14)

    def test_value_at_ten(self):
        assert e1(10.0) == pytest.approx(E1_AT_10, rel=1e-11)

    def test_log_singularity_constant(self):
        # e1(x) + ln(x) -> -gamma as x -> 0+
        x = 1e-8
        assert e1(x) + math.log(x) == pytest.approx(-EULER_GAMMA, abs=1e-7)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            e1(0.0)
        with pytest.raises(ValueError):
            e1(-2.0)

    def test_branch_agreement(self):
        # both evaluation branches must agree through the overlap window
        strict = Accuracy(1e-13, 1e-13)
        for x in np.linspace(0.5, 2.0, 31):
            assert _e1_series(float(x), strict) == pytest.approx(
                _e1_confrac(float(x)), abs=1e-12)

    @given(st.floats(min_value=-6.0, max_value=math.log10(50.0)))
    @settings(max_examples=60, deadline=None)
    def test_positive_and_decreasing(self, exponent):
        x1 = 10.0 ** exponent
        x2 = x1 * 1.7
        v1, v2 = e1(x1), e1(x2)
        assert v1 > v2 > 0.0

    def test_array_matches_scalar(self):
        xs = np.array([1e-4, 0.3, 0.999, 1.0, 2.5, 17.0])
        vec = e1_array(xs)
        for x, v in zip(xs, vec):
            assert v == pytest.approx(e1(float(x)), rel=1e-14)


class TestEkAndMoments:
    def test_ek_single_term(self):
        assert ek(0, 7.3) == 1.0

    def test_ek_partial_sum(self):
        assert ek(2, 1.0) == pytest.approx(2.5, abs=1e-15)

    def test_ek_converges_to_exp(self):
        assert ek(30, 1.0) == pytest.approx(math.e, abs=1e-12)

    def test_ek_domain(self):
        with pytest.raises(ValueError):
            ek(-1, 1.0)

    def test_moment_limit_at_zero(self):
        assert e1_moment(0, 1e-10) == pytest.approx(-1.0, abs=1e-8)

    def test_moment_at_one(self):
        expected = E1_AT_1 - math.exp(-1.0)
        assert e1_moment(0, 1.0) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(-0.1484955, abs=5e-8)

    @pytest.mark.parametrize("n", [0, 1, 2])
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_moment_is_antiderivative(self, n, x):
        h = 1e-5
        fd = (e1_moment(n, x + h) - e1_moment(n, x - h)) / (2 * h)
        assert fd == pytest.approx(x ** n * e1(x), abs=1e-6)

    def test_moment_domain(self):
        with pytest.raises(ValueError):
            e1_moment(-1, 1.0)


class TestLogGamma:
    def test_exact_points(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)),
                                               rel=1e-13)
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-13)

    def test_against_stdlib(self):
        for s in np.geomspace(1e-3, 1e4, 200):
            assert log_gamma(float(s)) == pytest.approx(
                math.lgamma(float(s)), rel=1e-13, abs=1e-13)

    def test_array_route(self):
        s = np.geomspace(1e-2, 500.0, 64)
        vec = log_gamma_array(s)
        ref = np.array([math.lgamma(float(v)) for v in s])
        assert np.allclose(vec, ref, rtol=1e-13, atol=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)


class TestRegularizedGamma:
    @pytest.mark.parametrize("x", [0.5, 1.0, 3.0])
    def test_exponential_case(self, x):
        assert p_regularized(1.0, x) == pytest.approx(1.0 - math.exp(-x),
                                                      abs=1e-12)

    def test_zero(self):
        assert p_regularized(0.5, 0.0) == 0.0
        assert p_regularized(7.0, 0.0) == 0.0

    def test_erf_point(self):
        # gamma(1/2, 1)/Gamma(1/2) = erf(1); series-oracle value
        assert p_regularized(0.5, 1.0) == pytest.approx(0.8427007929497149,
                                                        abs=1e-12)

    def test_against_scipy(self):
        from scipy.special import gammainc
        s = np.geomspace(0.05, 40.0, 24)
        for x in (0.1, 1.0, 5.0, 30.0):
            mine = p_regularized_array(s, x)
            assert np.allclose(mine, gammainc(s, x), atol=5e-13)

    @given(st.floats(min_value=1e-3, max_value=50.0),
           st.floats(min_value=0.0, max_value=50.0))
    @settings(max_examples=80, deadline=None)
    def test_bounds(self, s, x):
        assert 0.0 <= p_regularized(s, x) <= 1.0

    def test_nondecreasing_in_x(self):
        xs = np.linspace(0.0, 10.0, 40)
        vals = [p_regularized(1.7, float(x)) for x in xs]
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_derivative_in_x(self, s, x):
        h = 1e-5
        fd = (p_regularized(s, x + h) - p_regularized(s, x - h)) / (2 * h)
        expected = x ** (s - 1.0) * math.exp(-x - log_gamma(s))
        assert fd == pytest.approx(expected, abs=1e-6)


class TestVolterraKernel:
    def test_frozen_values(self):
        assert volterra_s(1.0) == pytest.approx(S_AT_1, abs=1e-10)
        assert volterra_s(0.5) == pytest.approx(S_AT_HALF, abs=1e-10)
        assert volterra_s(2.0) == pytest.approx(S_AT_2, abs=1e-10)

    def test_positive(self):
        for x in (1e-10, 1e-3, 0.1, 1.0, 10.0, 100.0):
            assert volterra_s(x) > 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            volterra_s(0.0)
        with pytest.raises(ValueError):
            volterra_s(1e-13)

    def test_array_matches_scalar(self):
        xs = np.array([1e-6, 0.02, 0.5, 3.0, 60.0])
        vec = volterra_s_array(xs)
        for x, v in zip(xs, vec):
            assert v == pytest.approx(volterra_s(float(x)), rel=1e-10)

    def test_saturates_to_one(self):
        assert volterra_s(50.0) == 1.0
        assert volterra_s(39.0) == pytest.approx(1.0, abs=1e-12)


class TestCumulative:
    def test_zero(self):
        assert s_cumulative(0.0) == 0.0

    def test_strictly_increasing(self):
        pts = [0.5, 1.0, 2.0, 5.0]
        vals = [s_cumulative(x) for x in pts]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_cross_route_against_segment_oracle(self):
        # the smooth route must reproduce the frozen graded-Simpson
        # segments; the mass below the cut is differenced away
        base = s_cumulative(SEG_BELOW)
        for X, seg in SEG_FROZEN.items():
            assert s_cumulative(X) - base == pytest.approx(seg, abs=1e-8)

    def test_aux_ladder_bounded(self):
        for alpha in (1.0, 0.5, 0.1, 0.02, 0.005):
            assert alpha * s_cumulative(1.0 / alpha) <= AUX_BOUND

    def test_asymptotic_shift(self):
        # Q(X) - X -> 1/2 (the integrable excess of the kernel over 1)
        assert s_cumulative(30.0) - 30.0 == pytest.approx(0.5, abs=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            s_cumulative(-1.0)

    def test_first_moment_small(self):
        b = s_first_moment(1e-3)
        assert 0.0 < b < 1e-3 * s_cumulative(1e-3)


class TestKernelIdentities:
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_convolution_is_one(self, x):
        assert e1_s_convolution(x) == pytest.approx(1.0, abs=1e-6)

    def test_laplace_identities(self):
        from fracalc.quadrature import Integrand, Singularity, laplace
        from fracalc.special import volterra_integrand
        e1_f = Integrand(lambda t: e1(max(t, 1e-300)), Singularity.LOG_LEFT,
                         lambda t: e1_array(np.maximum(t, 1e-300)))
        for lam in (0.5, 1.0, 2.0, math.e - 1.0):
            assert laplace(e1_f, lam) == pytest.approx(
                math.log1p(lam) / lam, abs=1e-6)
            assert laplace(volterra_integrand(), lam) == pytest.approx(
                1.0 / math.log1p(lam), abs=1e-6)
        assert laplace(volterra_integrand(), math.e - 1.0) == pytest.approx(
            1.0, abs=1e-6)


class TestConstants:
    def test_zeta2_construction(self):
        assert CONSTANTS.zeta2 == math.pi ** 2 / 6.0

    def test_euler_gamma_window(self):
        assert 0.577 < CONSTANTS.euler_gamma < 0.578


class TestAccuracy:
    def test_invariants(self):
        with pytest.raises(ValueError):
            Accuracy(abs_tol=0.0)
        with pytest.raises(ValueError):
            Accuracy(rel_tol=-1.0)
        with pytest.raises(ValueError):
            Accuracy(max_work=7)

    def test_tolerance_combines(self):
        a = Accuracy(1e-10, 1e-6)
        assert a.tolerance(1.0) == 1e-6
        assert a.tolerance(0.0) == 1e-10

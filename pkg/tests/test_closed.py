import math

import numpy as np
import pytest
from scipy.integrate import quad

from sinebeta.closed import (
    beta4_q1,
    beta4_q2,
    hp_delta1_density,
    sine2_rho2,
    sine4_rho2,
)
from sinebeta.ode import integrate_q
from sinebeta.series import get_coefficients, hp_density_series, sine_pair_corr_series

PI = math.pi
FOUR_PI_SQ = 4 * PI**2


class TestSine2:
    def test_zero(self):
        assert sine2_rho2(0.0) == 0.0

    def test_2pi(self):
        assert sine2_rho2(2 * PI) == pytest.approx(1 / FOUR_PI_SQ, rel=1e-14)

    def test_pi(self):
        assert sine2_rho2(PI) == pytest.approx((1 - 4 / PI**2) / FOUR_PI_SQ, rel=1e-14)

    def test_series_branch_continuity(self):
        assert sine2_rho2(9.9e-5) == pytest.approx(sine2_rho2(1.01e-4), rel=1e-6)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            sine2_rho2(-1.0)


class TestSine4:
    def test_zero(self):
        assert sine4_rho2(0.0) == 0.0

    def test_small_lambda_matches_leading_constant(self):
        # leading order lam^4/135 within 1% at lam = 0.05
        lam = 0.05
        c2 = 2**4 * math.factorial(2) ** 3 / (math.factorial(4) * math.factorial(6))
        lead = c2 * lam**4 / FOUR_PI_SQ
        assert abs(sine4_rho2(lam) - lead) / lead < 0.01

    def test_matches_series_engine(self):
        for lam in (0.5, 3.0, 10.0, 22.0, 30.0):
            assert sine4_rho2(lam) == pytest.approx(
                sine_pair_corr_series(2, lam), abs=1e-9
            )

    def test_bounds(self):
        for lam in np.linspace(0, 40, 81):
            v2, v4 = sine2_rho2(lam), sine4_rho2(lam)
            assert -1e-12 <= v2 <= 0.04
            assert -1e-12 <= v4 <= 0.04

    def test_large_lambda_limit(self):
        for lam in (10.0, 20.0, 50.0, 200.0):
            assert abs(sine2_rho2(lam) - 1 / FOUR_PI_SQ) <= 0.5 / lam
            assert abs(sine4_rho2(lam) - 1 / FOUR_PI_SQ) <= 0.5 / lam


class TestBeta4Q:
    def test_domain(self):
        with pytest.raises(ValueError):
            beta4_q2(1e-3)
        with pytest.raises(ValueError):
            beta4_q1(5e-4)

    def test_limit_to_one_at_zero(self):
        # boundary value q2(0) = 1, approached through the valid domain
        assert beta4_q2(2e-3) == pytest.approx(1.0, abs=2e-3)

    def test_derivative_at_zero(self):
        # q2'(0) = 2i/3 by Richardson extrapolation of the closed form
        h = 1e-2
        d1 = (beta4_q2(h) - 1.0) / h
        d2 = (beta4_q2(h / 2) - 1.0) / (h / 2)
        extrap = 2 * d2 - d1
        assert extrap == pytest.approx(2j / 3, abs=1e-4)

    def test_q2_against_ode(self):
        grid = np.array([2.0])
        run = integrate_q(2, 4.0, grid, rtol=1e-10, atol=1e-12)
        assert run.values[0, 1] == pytest.approx(beta4_q2(2.0), abs=1e-9)

    def test_q1_against_ode(self):
        grid = np.array([2.0, 7.0])
        run = integrate_q(2, 4.0, grid, rtol=1e-10, atol=1e-12)
        for i, lam in enumerate(grid):
            assert run.values[i, 0] == pytest.approx(beta4_q1(lam), abs=1e-9)


class TestHpDelta1:
    def test_zero(self):
        assert hp_delta1_density(3.0, 0.0) == 0.0

    def test_beta2_reduction(self):
        for lam in (0.5, PI, 6.0):
            target = (1 - (math.sin(lam / 2) / (lam / 2)) ** 2) / (2 * PI)
            assert hp_delta1_density(2.0, lam) == pytest.approx(target, abs=1e-12)

    @pytest.mark.parametrize("beta", [0.7, 2.0, 3.0, 4.0, 6.0, 9.0])
    def test_forms_agree(self, beta):
        for lam in (0.5, 1.0, 4.0, 17.0, 50.0):
            a = hp_delta1_density(beta, lam, "hypergeometric")
            b = hp_delta1_density(beta, lam, "integral")
            assert a == pytest.approx(b, abs=1e-9)

    def test_integral_form_needs_positive_lambda(self):
        with pytest.raises(ValueError):
            hp_delta1_density(3.0, 0.0, "integral")

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            hp_delta1_density(3.0, 1.0, "other")

    def test_chain_to_sine2(self):
        # rho2(beta=2) = (1/2pi) * delta=1 density at beta=2
        for lam in (0.3, 2.0, 9.0, 25.0):
            assert sine2_rho2(lam) == pytest.approx(
                hp_delta1_density(2.0, lam) / (2 * PI), abs=1e-12
            )

    def test_matches_series_engine_at_integer_order(self):
        coeffs = get_coefficients(1, 5.0, 8.0, tol=1e-12)
        for lam in (0.5, 2.0, 8.0):
            assert hp_delta1_density(5.0, lam) == pytest.approx(
                hp_density_series(coeffs, lam), abs=1e-10
            )

    def test_quadrature_oracle_direct(self):
        # independent check of the integral form against raw quadrature
        beta, lam = 3.0, 2.0
        a = 4.0 / beta
        val, _ = quad(lambda s: s ** (a - 1) * math.cos(lam - s), 0, lam, limit=200)
        target = 1 / (2 * PI) - (2 / (beta * PI)) * lam ** (-a) * val
        assert hp_delta1_density(beta, lam, "integral") == pytest.approx(target, abs=1e-12)

import math
from fractions import Fraction

import numpy as np
import pytest

from sinebeta.closed import beta4_q2, sine2_rho2
from sinebeta.matrices import build_system
from sinebeta.series import (
    compute_coefficients,
    get_coefficients,
    hp_density_series,
    q_series,
    q_series_deriv,
    sine_pair_corr_series,
    small_lambda_constant,
    small_lambda_constant_exact,
)

PI = math.pi


def closed_q1_beta2(lam: float) -> complex:
    """n=1, beta=2 moment: summing s_k = 2 i^k/(k+2)! gives 2(1+i lam-e^{i lam})/lam^2."""
    return 2 * (1 + 1j * lam - np.exp(1j * lam)) / lam**2


class TestCoefficients:
    def test_n1_beta2_factorial_form(self):
        coeffs = compute_coefficients(1, 2.0, 5.0, tol=1e-12)
        for k in range(0, 12):
            expect = 2.0 * (1j**k) / math.factorial(k + 2)
            assert coeffs.s(k)[0] == pytest.approx(expect, rel=1e-13, abs=1e-18)

    def test_s2_value(self):
        coeffs = compute_coefficients(1, 2.0, 1.0, tol=1e-12)
        assert coeffs.s(2)[0] == pytest.approx(-1.0 / 12.0, rel=1e-14)

    def test_s0_is_ones(self):
        for n, beta in ((1, 2.0), (2, 4.0), (3, 5.5)):
            coeffs = compute_coefficients(n, beta, 2.0, tol=1e-12)
            assert coeffs.s(0) == pytest.approx(np.ones(n), rel=1e-15)

    def test_s0_matches_resolvent_form(self):
        # -(n+1)/2 A^{-1} e must equal f
        for n in (1, 2, 4):
            m = build_system(n)
            x = np.linalg.solve(m.A, m.e)
            assert -(n + 1) / 2.0 * x == pytest.approx(np.ones(n), rel=1e-12)

    def test_n2_beta4_s1_exact_solve(self):
        # (I - A2) = [[2, 1/2], [-4, 5]], rhs = B f = (1, 2); solution (1/3, 2/3)
        M = np.array([[2.0, 0.5], [-4.0, 5.0]])
        sol = np.linalg.solve(M, np.array([1.0, 2.0]))
        assert sol == pytest.approx([1 / 3, 2 / 3], rel=1e-14)
        coeffs = compute_coefficients(2, 4.0, 2.0, tol=1e-12)
        assert coeffs.s(1) == pytest.approx(1j * sol, rel=1e-13)

    def test_parity_exact(self):
        coeffs = compute_coefficients(2, 4.0, 3.0, tol=1e-12)
        for k in range(0, 10, 2):
            assert np.all(coeffs.s(k).imag == 0.0)
        for k in range(1, 10, 2):
            assert np.all(coeffs.s(k).real == 0.0)

    def test_norm_bound_holds(self):
        # ||s_k|| <= kappa^k prod n/(j + 4n/beta) with the fitted kappa
        coeffs = compute_coefficients(3, 6.0, 5.0, tol=1e-12)
        p = 1.0
        for k in range(1, coeffs.K + 1):
            p *= 3.0 / (k + 4.0 * 3.0 / 6.0)
            norm = np.max(np.abs(coeffs.s(k)))
            assert norm <= coeffs.kappa**k * p * (1 + 1e-9)

    def test_tol_floor(self):
        with pytest.raises(ValueError):
            compute_coefficients(1, 2.0, 1.0, tol=1e-16)


class TestQSeries:
    def test_lambda_zero_is_f(self):
        coeffs = compute_coefficients(3, 6.0, 1.0, tol=1e-12)
        assert q_series(coeffs, 0.0).q == pytest.approx(np.ones(3), abs=0)

    def test_n1_beta2_closed_form(self):
        coeffs = compute_coefficients(1, 2.0, 25.0, tol=1e-13)
        for lam in (0.5, PI, 10.0, 20.0):
            got = q_series(coeffs, lam).q[0]
            assert got == pytest.approx(closed_q1_beta2(lam), abs=1e-12)
        assert q_series(coeffs, PI).q[0].real == pytest.approx(4 / PI**2, abs=1e-13)

    def test_n2_beta4_vs_explicit_solution(self):
        coeffs = compute_coefficients(2, 4.0, 2.0, tol=1e-13)
        got = q_series(coeffs, 1.0).q[1]
        assert got == pytest.approx(beta4_q2(1.0), abs=1e-10)

    def test_range_error(self):
        coeffs = compute_coefficients(1, 2.0, 1.0, tol=1e-12)
        with pytest.raises(ValueError):
            q_series(coeffs, 2.0)

    def test_modulus_bound(self):
        coeffs = compute_coefficients(2, 4.0, 30.0, tol=1e-12)
        for lam in np.linspace(0, 30, 41):
            assert np.all(np.abs(q_series(coeffs, lam).q) <= 1 + 1e-9)

    def test_ode_residual_of_series(self):
        # (beta/4) lam q' - (i (beta/4) lam B + A) q - (n+1)/2 e ~ 0
        for n, beta in ((1, 2.0), (2, 4.0), (3, 5.0)):
            m = build_system(n)
            coeffs = get_coefficients(n, beta, 10.0, tol=1e-13)
            for lam in (0.3, 2.0, 7.5):
                q = q_series(coeffs, lam).q
                dq = q_series_deriv(coeffs, lam)
                res = (
                    (beta / 4) * lam * dq
                    - 1j * (beta / 4) * lam * (m.b_diag * q)
                    - m.A @ q
                    - 0.5 * (n + 1) * m.e
                )
                assert np.max(np.abs(res)) < 1e-8


class TestHpDensity:
    def test_zero_at_origin(self):
        coeffs = get_coefficients(2, 4.0, 5.0, tol=1e-12)
        assert hp_density_series(coeffs, 0.0) == 0.0

    def test_n1_beta2_closed_form(self):
        coeffs = get_coefficients(1, 2.0, 12.0, tol=1e-12)
        for lam in (0.7, PI, 11.0):
            target = (1 - (math.sin(lam / 2) / (lam / 2)) ** 2) / (2 * PI)
            assert hp_density_series(coeffs, lam) == pytest.approx(target, abs=1e-12)
        assert hp_density_series(coeffs, PI) == pytest.approx(
            (1 - 4 / PI**2) / (2 * PI), abs=1e-13
        )

    def test_small_lambda_prefactor_generic_beta(self):
        # n=1: density ~ lam^2 / (4 pi (1+2/beta)(1+4/beta)) near 0
        beta = 3.0
        coeffs = get_coefficients(1, beta, 1.0, tol=1e-13)
        lam = 1e-3
        lead = lam**2 / (4 * PI * (1 + 2 / beta) * (1 + 4 / beta))
        assert hp_density_series(coeffs, lam) == pytest.approx(lead, rel=1e-5)

    def test_nonnegative_on_range(self):
        for n, beta in ((2, 4.0), (3, 6.0)):
            coeffs = get_coefficients(n, beta, 30.0, tol=1e-12)
            for lam in np.linspace(0, 30, 61):
                assert hp_density_series(coeffs, lam) >= -1e-10

    def test_truncation_self_consistency(self):
        # doubling the truncation order changes nothing beyond tol
        a = compute_coefficients(2, 4.0, 8.0, tol=1e-10)
        b = compute_coefficients(2, 4.0, 16.0, tol=1e-13)  # strictly deeper table
        assert b.K > a.K
        for lam in (0.5, 4.0, 8.0):
            assert hp_density_series(a, lam) == pytest.approx(
                hp_density_series(b, lam), abs=1e-10
            )


class TestPairCorrelation:
    def test_sinc_zero_at_2pi(self):
        assert sine_pair_corr_series(1, 2 * PI) == pytest.approx(1 / (4 * PI**2), abs=1e-13)

    def test_value_at_pi(self):
        expect = (1 - 4 / PI**2) / (4 * PI**2)
        assert sine_pair_corr_series(1, PI) == pytest.approx(expect, abs=1e-13)
        assert expect == pytest.approx(0.015064, abs=5e-7)

    def test_equals_scaled_density(self):
        coeffs = get_coefficients(2, 4.0, 6.0, tol=1e-12)
        for lam in (0.4, 3.3, 6.0):
            assert sine_pair_corr_series(2, lam) == pytest.approx(
                hp_density_series(coeffs, lam) / (2 * PI), abs=1e-12
            )

    def test_n2_small_lambda_constant(self):
        c2 = 2**4 * math.factorial(2) ** 3 / (math.factorial(4) * math.factorial(6))
        assert c2 == pytest.approx(16 * 8 / (24 * 720), abs=0)
        lead = c2 * 0.1**4 / (4 * PI**2)
        assert abs(sine_pair_corr_series(2, 0.1) - lead) / lead < 1e-3

    def test_matches_closed_beta2(self):
        for lam in np.linspace(0, 20, 41):
            assert sine_pair_corr_series(1, lam) == pytest.approx(
                sine2_rho2(lam), abs=1e-12
            )


class TestSmallLambdaConstant:
    def test_n1_beta2(self):
        assert small_lambda_constant(1, 2.0) == pytest.approx(1 / (24 * PI), rel=1e-13)

    def test_n1_beta4(self):
        assert small_lambda_constant(1, 4.0) == pytest.approx(1 / (12 * PI), rel=1e-13)

    def test_taylor_of_sine_kernel(self):
        # (1/2pi)(1 - sinc^2(lam/2)) ~ lam^2/(24 pi)
        lam = 1e-4
        val = (1 - (math.sin(lam / 2) / (lam / 2)) ** 2) / (2 * PI)
        assert val == pytest.approx(small_lambda_constant(1, 2.0) * lam**2, rel=1e-7)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_factorial_identity_at_beta_2n(self, n):
        # C(2n,n)^{-1} (n)^{2n} / (1+n)^(2n) == n^{2n} (n!)^3 / ((2n)! (3n)!)
        lhs = small_lambda_constant_exact(n, 2 * n)
        rhs = Fraction(n ** (2 * n) * math.factorial(n) ** 3,
                       math.factorial(2 * n) * math.factorial(3 * n))
        assert lhs == rhs

    def test_cor_small_lambda_chain(self):
        # (1/2pi) * leading coefficient equals the pair-correlation constant
        for n in (1, 2, 3):
            c_n = n ** (2 * n) * math.factorial(n) ** 3 / (
                math.factorial(2 * n) * math.factorial(3 * n)
            )
            assert small_lambda_constant(n, 2.0 * n) / (2 * PI) == pytest.approx(
                c_n / (4 * PI**2), rel=1e-12
            )

import math

import numpy as np
import pytest

from sinebeta.closed import beta4_q2, sine4_rho2
from sinebeta.ode import hp_density_ode, integrate_q, sine_pair_corr_ode
from sinebeta.series import get_coefficients, hp_density_series, q_series

PI = math.pi


def closed_q1_beta2(lam: float) -> complex:
    return 2 * (1 + 1j * lam - np.exp(1j * lam)) / lam**2


class TestIntegrateQ:
    def test_n1_beta2_closed_oracle(self):
        grid = np.array([1.0, 5.0, 20.0])
        run = integrate_q(1, 2.0, grid, rtol=1e-10, atol=1e-12)
        for i, lam in enumerate(grid):
            assert run.values[i, 0] == pytest.approx(closed_q1_beta2(lam), abs=1e-9)

    def test_n2_beta4_explicit_solution(self):
        grid = np.array([0.5, 2.0, 10.0])
        run = integrate_q(2, 4.0, grid, rtol=1e-10, atol=1e-12)
        for i, lam in enumerate(grid):
            assert run.values[i, 1] == pytest.approx(beta4_q2(lam), abs=1e-9)

    def test_seed_derivative_matches_initial_slope(self):
        # q2'(0) = 2i/3: check the solution's small-lambda behavior
        run = integrate_q(2, 4.0, np.array([0.02, 0.04]), rtol=1e-10, atol=1e-12)
        slope = (run.values[1, 1] - run.values[0, 1]) / 0.02
        assert slope == pytest.approx(2j / 3, abs=2e-2)

    def test_grid_below_lambda0_uses_series(self):
        grid = np.array([0.0, 0.005, 0.5])
        run = integrate_q(2, 4.0, grid, rtol=1e-10, atol=1e-12)
        assert run.values[0] == pytest.approx(np.ones(2), abs=0)
        coeffs = get_coefficients(2, 4.0, 1.0, tol=1e-13)
        assert run.values[1] == pytest.approx(q_series(coeffs, 0.005).q, abs=1e-12)

    def test_modulus_bound(self):
        run = integrate_q(3, 6.0, np.linspace(0.5, 30.0, 30), rtol=1e-10, atol=1e-12)
        assert run.modulus_max <= 1 + 1e-6

    def test_residual_reported(self):
        run = integrate_q(2, 4.0, np.array([5.0]), rtol=1e-10, atol=1e-12)
        assert run.residual_max <= 10 * max(1e-12, 1e-10)

    def test_rtol_floor(self):
        with pytest.raises(ValueError):
            integrate_q(1, 2.0, np.array([1.0]), rtol=1e-13)

    def test_lambda0_range(self):
        with pytest.raises(ValueError):
            integrate_q(1, 2.0, np.array([1.0]), lambda0=0.5)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            integrate_q(1, 2.0, np.array([-1.0, 1.0]))
        with pytest.raises(ValueError):
            integrate_q(1, 2.0, np.array([1.0, 0.5]))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_engine_equivalence(self, n):
        # sup |q_ode - q_series| <= 1e-8 for beta in {2n, 2n +/- 0.5}, lam <= 30
        grid = np.linspace(0.5, 30.0, 13) if n <= 4 else np.linspace(0.5, 30.0, 7)
        for beta in (2.0 * n, 2.0 * n - 0.5, 2.0 * n + 0.5):
            coeffs = get_coefficients(n, beta, 30.0, tol=1e-12)
            run = integrate_q(n, beta, grid, rtol=1e-10, atol=1e-12)
            worst = 0.0
            for i, lam in enumerate(grid):
                worst = max(worst, np.max(np.abs(run.values[i] - q_series(coeffs, lam).q)))
            assert worst <= 1e-8, f"n={n}, beta={beta}: {worst:.2e}"


class TestDensityFromRuns:
    def test_zero_limit(self):
        run = integrate_q(2, 4.0, np.array([0.0, 1.0]), rtol=1e-10, atol=1e-12)
        dens = hp_density_ode(run)
        assert dens[0] == pytest.approx(0.0, abs=1e-14)

    def test_n1_beta2_value(self):
        run = integrate_q(1, 2.0, np.array([PI]), rtol=1e-10, atol=1e-12)
        assert hp_density_ode(run)[0] == pytest.approx((1 - 4 / PI**2) / (2 * PI), abs=1e-10)

    def test_matches_series_density(self):
        coeffs = get_coefficients(2, 4.0, 10.0, tol=1e-12)
        run = integrate_q(2, 4.0, np.array([10.0]), rtol=1e-10, atol=1e-12)
        assert hp_density_ode(run)[0] == pytest.approx(
            hp_density_series(coeffs, 10.0), abs=1e-8
        )

    def test_pair_corr_requires_beta_2n(self):
        run = integrate_q(2, 5.0, np.array([1.0]), rtol=1e-10, atol=1e-12)
        with pytest.raises(ValueError):
            sine_pair_corr_ode(run)

    def test_pair_corr_matches_classical(self):
        grid = np.linspace(0.0, 20.0, 21)
        run = integrate_q(2, 4.0, grid, rtol=1e-10, atol=1e-12)
        vals = sine_pair_corr_ode(run)
        for lam, v in zip(grid, vals):
            assert v == pytest.approx(sine4_rho2(lam), abs=1e-7)

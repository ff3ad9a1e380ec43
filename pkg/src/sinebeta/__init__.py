"""Pair correlation of the Sine_beta process and densities of the HP process.

Three independent engines compute the same curves: a Monte Carlo diffusion
simulation valid for all beta > 0 and delta > 0, an exact power series for
integer delta, and direct ODE integration of the moment system.  Closed-form
expressions at beta = 2, 4 and delta = 1 serve as oracles.
"""

from .closed import beta4_q1, beta4_q2, hp_delta1_density, sine2_rho2, sine4_rho2
from .matrices import (
    IdentityReport,
    SystemMatrices,
    build_system,
    eigenvalues_A,
    identity_report,
    involution_T,
)
from .ode import OdeRun, StiffnessError, hp_density_ode, integrate_q, sine_pair_corr_ode
from .sde import (
    ConfigError,
    ContinuityReport,
    DecayReport,
    MomentEstimates,
    PrecisionError,
    SdeConfig,
    SimulationResult,
    continuity_scan,
    decay_report,
    mc_hp_density,
    mc_pair_correlation,
    simulate_paths,
)
from .series import (
    QValue,
    SeriesCoefficients,
    compute_coefficients,
    get_coefficients,
    hp_density_series,
    q_series,
    sine_pair_corr_series,
    small_lambda_constant,
)
from .special import (
    CoeffSeq,
    ConvergenceError,
    hyp1f2,
    pochhammer_ratio_seq,
    sine_integral,
    theta_cdf_partial,
    theta_density,
    theta_fourier_coeff,
)
from .table import CSV_HEADER, CurveRow, CurveTable

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "CoeffSeq",
    "ConfigError",
    "ContinuityReport",
    "ConvergenceError",
    "CurveRow",
    "CurveTable",
    "DecayReport",
    "IdentityReport",
    "MomentEstimates",
    "OdeRun",
    "PrecisionError",
    "QValue",
    "SdeConfig",
    "SeriesCoefficients",
    "SimulationResult",
    "StiffnessError",
    "SystemMatrices",
    "beta4_q1",
    "beta4_q2",
    "build_system",
    "compute_coefficients",
    "continuity_scan",
    "decay_report",
    "eigenvalues_A",
    "get_coefficients",
    "hp_delta1_density",
    "hp_density_ode",
    "hp_density_series",
    "hyp1f2",
    "identity_report",
    "integrate_q",
    "involution_T",
    "mc_hp_density",
    "mc_pair_correlation",
    "pochhammer_ratio_seq",
    "q_series",
    "simulate_paths",
    "sine2_rho2",
    "sine4_rho2",
    "sine_integral",
    "sine_pair_corr_ode",
    "sine_pair_corr_series",
    "small_lambda_constant",
    "theta_cdf_partial",
    "theta_density",
    "theta_fourier_coeff",
]

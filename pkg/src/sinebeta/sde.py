"""Monte Carlo engine: valid for every beta > 0 and delta > 0.

The diffusion in its real drift form,

    d alpha = lambda (beta/4) e^{beta u / 4} du - delta sin(alpha) du
              + (cos(alpha) - 1) dB1 + sin(alpha) dB2,
    alpha(-inf) = 0,

is truncated to a finite window [nu, 0] by the scale invariance of the
process: starting at nu = -(4/beta) log(lambda_max / eps_cut) is equivalent
to starting the largest grid lambda at the effective value eps_cut.  The
window is shared by the whole lambda grid and so are the Brownian
increments, which preserves the pathwise monotonicity of alpha in lambda.

Estimated moments m_k = E[cos(k alpha_lambda(0))] then assemble the pair
correlation (for delta = beta/2) and the conditioned-process density via the
Pochhammer-ratio weights.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernel
from .special import coeff_tail_bound, pochhammer_ratio_seq
from .table import CurveRow, CurveTable

FOUR_PI_SQ = 4.0 * math.pi**2

_KMAX_ABS_FLOOR = 1e-4
_KMAX_MIN = 8
_KMAX_CAP = 50_000


class ConfigError(ValueError):
    """The run configuration violates a structural requirement."""


class PrecisionError(RuntimeError):
    """Monte Carlo noise is too large for the requested check."""


def thread_count() -> int:
    """Worker count: min(SINEBETA_THREADS, hardware), at least 1."""
    import numba

    hw = numba.config.NUMBA_NUM_THREADS
    env = os.environ.get("SINEBETA_THREADS")
    if env:
        try:
            return max(1, min(int(env), hw))
        except ValueError as exc:
            raise ConfigError(f"SINEBETA_THREADS must be an integer, got {env!r}") from exc
    return hw


@dataclass(frozen=True)
class SdeConfig:
    beta: float
    delta: float
    lambda_grid: tuple[float, ...]
    eps_cut: float = 1e-3
    dt: float = 1e-3
    paths: int = 200_000
    master_seed: int = 0
    k_max: int | str = "auto"

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if not self.delta > 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        grid = tuple(float(x) for x in self.lambda_grid)
        object.__setattr__(self, "lambda_grid", grid)
        if len(grid) == 0:
            raise ConfigError("lambda_grid must be non-empty")
        if any(x <= 0 for x in grid):
            raise ConfigError("lambda_grid values must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("lambda_grid must be strictly increasing")
        if not 0 < self.eps_cut < grid[-1]:
            raise ConfigError(
                f"eps_cut must lie in (0, lambda_max); got {self.eps_cut} with lambda_max {grid[-1]}"
            )
        if not 0 < self.dt <= 1e-2:
            raise ConfigError(f"dt must lie in (0, 1e-2], got {self.dt}")
        if self.paths < 1:
            raise ConfigError(f"paths must be >= 1, got {self.paths}")
        if self.k_max != "auto" and (not isinstance(self.k_max, int) or self.k_max < 1):
            raise ConfigError(f"k_max must be 'auto' or a positive integer, got {self.k_max}")

    @property
    def lambda_max(self) -> float:
        return self.lambda_grid[-1]

    @property
    def nu(self) -> float:
        """Start time of the truncated window; lambda_max * e^{beta nu/4} = eps_cut."""
        return -(4.0 / self.beta) * math.log(self.lambda_max / self.eps_cut)

    @property
    def n_steps(self) -> int:
        return max(1, int(math.ceil(-self.nu / self.dt)))

    @property
    def step(self) -> float:
        return -self.nu / self.n_steps

    def resolved_k_max(self) -> int:
        if self.k_max != "auto":
            return self.k_max
        if self.delta == round(self.delta):
            return int(round(self.delta))  # exact: coefficients vanish beyond n
        c = 1.0
        for k in range(1, _KMAX_CAP + 1):
            c *= (-self.delta + k - 1) / (self.delta + k)
            if k >= _KMAX_MIN and abs(c) < _KMAX_ABS_FLOOR:
                return k
        raise ConfigError(
            f"auto k_max did not resolve below {_KMAX_CAP} for delta={self.delta}"
        )

    def as_dict(self) -> dict:
        return {
            "beta": self.beta,
            "delta": self.delta,
            "lambda_grid": list(self.lambda_grid),
            "eps_cut": self.eps_cut,
            "dt": self.dt,
            "paths": self.paths,
            "master_seed": self.master_seed,
            "k_max": self.k_max,
            "k_max_resolved": self.resolved_k_max(),
            "nu": self.nu,
            "n_steps": self.n_steps,
        }


@dataclass(frozen=True)
class MomentEstimates:
    lam: float
    m_k: np.ndarray
    se_k: np.ndarray
    paths: int


@dataclass(frozen=True)
class SimulationResult:
    config: SdeConfig
    moments: list[MomentEstimates]
    monotone_fraction: float
    alpha_final: np.ndarray = field(repr=False)


def _final_angles(config: SdeConfig) -> tuple[np.ndarray, np.ndarray]:
    import numba

    numba.set_num_threads(thread_count())
    lams = np.asarray(config.lambda_grid, dtype=float)
    nu = config.nu
    h = config.step
    j = np.arange(config.n_steps, dtype=float)
    drift = (config.beta / 4.0) * np.exp(config.beta * (nu + j * h) / 4.0) * h
    alpha = np.empty((config.paths, len(lams)))
    flags = np.zeros(config.paths, dtype=np.int8)
    _kernel.run_paths(
        lams,
        drift,
        h,
        math.sqrt(h),
        config.delta,
        np.uint64(config.master_seed & 0xFFFFFFFFFFFFFFFF),
        config.paths,
        alpha,
        flags,
    )
    if flags.any():
        raise RuntimeError(
            f"|alpha| exceeded {_kernel.BLOWUP_LIMIT:.0e} on {int(flags.sum())} paths; "
            "the step size is too large for this configuration"
        )
    return alpha, flags


def simulate_paths(config: SdeConfig, verify_reproducibility: bool = True) -> SimulationResult:
    """Run the Euler-Maruyama ensemble and estimate cos-moments per grid lambda.

    With verify_reproducibility, the first few paths are recomputed after the
    parallel run and compared bitwise, which would expose any cross-thread
    contamination of the per-path streams.
    """
    alpha, _ = _final_angles(config)
    if verify_reproducibility and config.paths > 1:
        probe = min(64, config.paths)
        alpha2, _ = _final_angles(replace(config, paths=probe))
        if not np.array_equal(alpha[:probe], alpha2):
            raise RuntimeError("reproducibility violation: per-path streams are not isolated")

    k_max = config.resolved_k_max()
    moments = []
    sqrt_n = math.sqrt(config.paths)
    cos_prev = np.ones_like(alpha)
    cos_cur = np.cos(alpha)
    base = cos_cur.copy()
    m = np.empty((k_max, alpha.shape[1]))
    se = np.empty_like(m)
    for k in range(1, k_max + 1):
        if k > 1:
            cos_cur, cos_prev = 2.0 * base * cos_cur - cos_prev, cos_cur
        m[k - 1] = cos_cur.mean(axis=0)
        se[k - 1] = (
            cos_cur.std(axis=0, ddof=1) / sqrt_n if config.paths > 1 else np.zeros(alpha.shape[1])
        )
    for i, lam in enumerate(config.lambda_grid):
        moments.append(
            MomentEstimates(lam=lam, m_k=m[:, i].copy(), se_k=se[:, i].copy(), paths=config.paths)
        )

    slack = 10.0 * config.dt
    if alpha.shape[1] > 1:
        mono = np.all(np.diff(alpha, axis=1) >= -slack, axis=1)
        monotone_fraction = float(mono.mean())
    else:
        monotone_fraction = 1.0
    return SimulationResult(
        config=config, moments=moments, monotone_fraction=monotone_fraction, alpha_final=alpha
    )


def _assemble(config: SdeConfig, result: SimulationResult, engine: str, scale: float, offset: float) -> CurveTable:
    k_max = config.resolved_k_max()
    seq = pochhammer_ratio_seq(config.delta, k_max)
    c = seq.values
    tail = scale * coeff_tail_bound(config.delta, k_max + 1)
    table = CurveTable()
    for est in result.moments:
        value = offset + scale * float(np.dot(c, est.m_k))
        stderr = scale * math.sqrt(float(np.dot(c * c, est.se_k * est.se_k)))
        table.rows.append(
            CurveRow(
                lam=est.lam,
                value=value,
                stderr=stderr,
                engine=engine,
                beta=config.beta,
                delta=config.delta,
                order=k_max,
                seed=config.master_seed,
                tail_bound=tail,
            )
        )
    return table


def mc_pair_correlation(config: SdeConfig, result: SimulationResult | None = None) -> CurveTable:
    """Pair correlation 1/4pi^2 + (1/2pi^2) sum_k c_k m_k; needs delta = beta/2."""
    if config.delta != config.beta / 2.0:
        raise ConfigError(
            f"pair correlation requires delta = beta/2 exactly; got delta={config.delta}, "
            f"beta={config.beta}"
        )
    if result is None:
        result = simulate_paths(config)
    return _assemble(config, result, "mc", 1.0 / (2.0 * math.pi**2), 1.0 / FOUR_PI_SQ)


def mc_hp_density(config: SdeConfig, result: SimulationResult | None = None) -> CurveTable:
    """Conditioned-process density 1/2pi + (1/pi) sum_k c_k m_k."""
    if result is None:
        result = simulate_paths(config)
    return _assemble(config, result, "mc", 1.0 / math.pi, 1.0 / (2.0 * math.pi))


@dataclass(frozen=True)
class DecayReport:
    beta: float
    lambdas: tuple[float, ...]
    deviations: np.ndarray
    stderrs: np.ndarray
    envelopes: np.ndarray
    ratios: np.ndarray
    fitted_c: float
    passed: bool
    detail: str


def decay_envelope(beta: float, lam: float) -> float:
    """lam^-1 + lam^-beta/2 + lam^-4/beta: the proven decay shape for lam >= 2."""
    return lam**-1.0 + lam ** (-beta / 2.0) + lam ** (-4.0 / beta)


def decay_report(
    beta: float,
    lambdas,
    paths: int = 40_000,
    dt: float = 1e-3,
    eps_cut: float = 1e-3,
    master_seed: int = 0,
) -> DecayReport:
    """Check |rho2 - 1/4pi^2| against the decay envelope over lambda >= 2.

    Fits the constant as the largest observed ratio, and flags an upward
    trend when the last ratio exceeds twice the median.  Requires the MC
    standard error to stay below half the envelope everywhere.
    """
    lambdas = tuple(float(x) for x in lambdas)
    if any(lam < 2.0 for lam in lambdas):
        raise ValueError(f"decay bound applies for lambda >= 2, got {lambdas}")
    config = SdeConfig(
        beta=beta,
        delta=beta / 2.0,
        lambda_grid=lambdas,
        dt=dt,
        eps_cut=eps_cut,
        paths=paths,
        master_seed=master_seed,
    )
    table = mc_pair_correlation(config)
    dev = np.array([abs(r.value - 1.0 / FOUR_PI_SQ) for r in table])
    se = np.array([r.stderr for r in table])
    env = np.array([decay_envelope(beta, lam) for lam in lambdas])
    if np.any(se > env / 2.0):
        worst = int(np.argmax(se / env))
        raise PrecisionError(
            f"stderr {se[worst]:.2e} exceeds half the envelope {env[worst]:.2e} "
            f"at lambda={lambdas[worst]}; increase paths"
        )
    ratios = dev / env
    fitted_c = float(ratios.max())
    trend_ok = bool(ratios[-1] <= 2.0 * float(np.median(ratios)))
    passed = math.isfinite(fitted_c) and trend_ok
    detail = (
        f"fitted c = {fitted_c:.4g}; ratios = {np.array2string(ratios, precision=4)}; "
        f"last <= 2 x median: {trend_ok}"
    )
    return DecayReport(
        beta=beta,
        lambdas=lambdas,
        deviations=dev,
        stderrs=se,
        envelopes=env,
        ratios=ratios,
        fitted_c=fitted_c,
        passed=passed,
        detail=detail,
    )


@dataclass(frozen=True)
class ContinuityReport:
    betas: tuple[float, ...]
    lam: float
    values: np.ndarray
    stderrs: np.ndarray
    diffs: np.ndarray
    budget: np.ndarray
    passed: bool
    detail: str


def continuity_scan(
    betas,
    lam: float,
    paths: int = 4_000,
    dt: float = 1e-3,
    eps_cut: float = 1e-3,
    master_seed: int = 0,
) -> ContinuityReport:
    """Smoke test of continuity of the pair correlation in beta.

    All betas share the master seed, so the curves are coupled through the
    same noise; successive differences must stay below
    max(5 * stderr, 0.1 * total variation).
    """
    betas = tuple(float(b) for b in betas)
    if any(b2 - b1 > 0.25 + 1e-12 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("adjacent beta spacing must be <= 0.25")
    values = []
    ses = []
    for b in betas:
        config = SdeConfig(
            beta=b,
            delta=b / 2.0,
            lambda_grid=(lam,),
            dt=dt,
            eps_cut=eps_cut,
            paths=paths,
            master_seed=master_seed,
        )
        row = mc_pair_correlation(config).rows[0]
        values.append(row.value)
        ses.append(row.stderr)
    values = np.array(values)
    ses = np.array(ses)
    if len(betas) < 2:
        return ContinuityReport(
            betas=betas,
            lam=lam,
            values=values,
            stderrs=ses,
            diffs=np.array([]),
            budget=np.array([]),
            passed=True,
            detail="degenerate grid",
        )
    diffs = np.abs(np.diff(values))
    tv = float(diffs.sum())
    pair_se = np.sqrt(ses[:-1] ** 2 + ses[1:] ** 2)
    budget = np.maximum(5.0 * pair_se, 0.1 * tv)
    passed = bool(np.all(diffs <= budget))
    detail = (
        f"diffs = {np.array2string(diffs, precision=3)}, "
        f"budget = {np.array2string(budget, precision=3)}"
    )
    return ContinuityReport(
        betas=betas,
        lam=lam,
        values=values,
        stderrs=ses,
        diffs=diffs,
        budget=budget,
        passed=passed,
        detail=detail,
    )

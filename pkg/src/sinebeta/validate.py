"""Validation suites: the fast smoke suite and the full acceptance criteria.

Every check returns a CheckResult; the CLI prints one pass/fail line per
check and exits nonzero if any fails.  The full suite is the package's
acceptance gate and is also what tests/test_acceptance.py asserts on.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import closed, matrices, ode, sde, series
from .table import CurveRow, CurveTable

FOUR_PI_SQ = 4.0 * math.pi**2


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    elapsed: float = 0.0
    tables: dict[str, CurveTable] = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.elapsed:.2f}s)"


def _series_rows(n: int, beta: float, grid, values, coeffs) -> CurveTable:
    table = CurveTable()
    for lam, val in zip(grid, values):
        table.rows.append(
            CurveRow(
                lam=float(lam),
                value=float(val),
                stderr=None,
                engine="series",
                beta=beta,
                delta=float(n),
                order=coeffs.K,
                seed=None,
                tail_bound=coeffs.tail_bound,
            )
        )
    return table


def _warm_kernel() -> None:
    """Trigger the JIT compile outside any timed region."""
    cfg = sde.SdeConfig(beta=2.0, delta=1.0, lambda_grid=(1.0,), paths=8, master_seed=0)
    sde.simulate_paths(cfg, verify_reproducibility=False)


# ---------------------------------------------------------------------------
# acceptance criteria


def criterion_1_sine_kernel(seed: int = 0) -> CheckResult:
    """Series engine (n=1, beta=2) vs the sine kernel: 200 points on [0, 20],
    max abs error <= 1e-10, under 1 second."""
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 20.0, 200)
    coeffs = series.compute_coefficients(1, 2.0, 20.0, tol=1e-12)
    vals = [series.hp_density_series(coeffs, lam) / (2.0 * math.pi) for lam in grid]
    err = max(abs(v - closed.sine2_rho2(lam)) for lam, v in zip(grid, vals))
    elapsed = time.perf_counter() - t0
    passed = err <= 1e-10 and elapsed < 1.0
    return CheckResult(
        "criterion 1: sine-kernel reproduction (series n=1 vs closed, 1e-10)",
        passed,
        f"max abs err {err:.2e}, runtime {elapsed:.2f}s",
        elapsed,
        {"sine_kernel_series": _series_rows(1, 2.0, grid, vals, coeffs)},
    )


def criterion_2_beta4(seed: int = 0) -> CheckResult:
    """Series and ODE engines (n=2, beta=4) vs the classical beta=4 formula on
    [0, 30]: series <= 1e-8, ODE <= 1e-7, under 5 seconds."""
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 30.0, 121)
    coeffs = series.compute_coefficients(2, 4.0, 30.0, tol=1e-12)
    s_vals = [series.hp_density_series(coeffs, lam) / (2.0 * math.pi) for lam in grid]
    run = ode.integrate_q(2, 4.0, grid, rtol=1e-10, atol=1e-12)
    o_vals = ode.sine_pair_corr_ode(run)
    exact = [closed.sine4_rho2(lam) for lam in grid]
    err_s = max(abs(a - b) for a, b in zip(s_vals, exact))
    err_o = max(abs(a - b) for a, b in zip(o_vals, exact))
    elapsed = time.perf_counter() - t0
    passed = err_s <= 1e-8 and err_o <= 1e-7 and elapsed < 5.0
    table = _series_rows(2, 4.0, grid, s_vals, coeffs)
    for lam, val in zip(grid, o_vals):
        table.rows.append(
            CurveRow(float(lam), float(val), None, "ode", 4.0, 2.0, run.seed_order, None, None)
        )
    return CheckResult(
        "criterion 2: beta=4 reproduction (series 1e-8 / ODE 1e-7 on [0,30])",
        passed,
        f"series err {err_s:.2e}, ode err {err_o:.2e}, runtime {elapsed:.2f}s",
        elapsed,
        {"beta4_engines": table},
    )


def criterion_3_mc_beta2(seed: int = 0) -> CheckResult:
    """MC at beta=2 (2e5 paths, dt=1e-3) vs the sine kernel at
    lambda in {0.5, pi, 2 pi, 10}: within 3 stderr and 5e-3 absolute."""
    _warm_kernel()
    t0 = time.perf_counter()
    lams = (0.5, math.pi, 2 * math.pi, 10.0)
    cfg = sde.SdeConfig(
        beta=2.0, delta=1.0, lambda_grid=lams, dt=1e-3, paths=200_000, master_seed=seed + 303
    )
    table = sde.mc_pair_correlation(cfg)
    zs, abss = [], []
    for row, lam in zip(table, lams):
        exact = closed.sine2_rho2(lam)
        zs.append(abs(row.value - exact) / row.stderr)
        abss.append(abs(row.value - exact))
    elapsed = time.perf_counter() - t0
    passed = max(zs) <= 3.0 and max(abss) <= 5e-3 and elapsed < 180.0
    return CheckResult(
        "criterion 3: MC vs exact at beta=2 (3 stderr and 5e-3)",
        passed,
        f"max |z| {max(zs):.2f}, max abs err {max(abss):.2e}, runtime {elapsed:.1f}s",
        elapsed,
        {"mc_beta2": table},
    )


def criterion_4_mc_beta4(seed: int = 0) -> CheckResult:
    """Same MC protocol at beta=4 vs the classical formula at {1, pi, 8}."""
    _warm_kernel()
    t0 = time.perf_counter()
    lams = (1.0, math.pi, 8.0)
    cfg = sde.SdeConfig(
        beta=4.0, delta=2.0, lambda_grid=lams, dt=1e-3, paths=200_000, master_seed=seed + 404
    )
    table = sde.mc_pair_correlation(cfg)
    zs = [abs(row.value - closed.sine4_rho2(lam)) / row.stderr for row, lam in zip(table, lams)]
    elapsed = time.perf_counter() - t0
    passed = max(zs) <= 3.0 and elapsed < 180.0
    return CheckResult(
        "criterion 4: MC vs exact at beta=4 (3 stderr)",
        passed,
        f"max |z| {max(zs):.2f}, runtime {elapsed:.1f}s",
        elapsed,
        {"mc_beta4": table},
    )


def criterion_5_mc_delta1(seed: int = 0) -> CheckResult:
    """MC density at a non-classical beta (beta=3, delta=1) vs the exact
    delta=1 formula at lambda in {1, 4}."""
    _warm_kernel()
    t0 = time.perf_counter()
    lams = (1.0, 4.0)
    cfg = sde.SdeConfig(
        beta=3.0, delta=1.0, lambda_grid=lams, dt=1e-3, paths=100_000, master_seed=seed + 505
    )
    table = sde.mc_hp_density(cfg)
    zs = [
        abs(row.value - closed.hp_delta1_density(3.0, lam)) / row.stderr
        for row, lam in zip(table, lams)
    ]
    elapsed = time.perf_counter() - t0
    passed = max(zs) <= 3.0
    return CheckResult(
        "criterion 5: MC general-beta anchor via delta=1 (beta=3, 3 stderr)",
        passed,
        f"max |z| {max(zs):.2f}, runtime {elapsed:.1f}s",
        elapsed,
        {"mc_hp_beta3": table},
    )


def criterion_6_small_lambda(seed: int = 0) -> CheckResult:
    """Small-lambda asymptotics: series / (C_n lam^{2n} / 4 pi^2) within 2%
    at lam = 0.05 (n = 1, 2) and lam = 0.1 (n = 3)."""
    t0 = time.perf_counter()
    ratios = []
    for n, lam in ((1, 0.05), (2, 0.05), (3, 0.1)):
        c_n = n ** (2 * n) * math.factorial(n) ** 3 / (
            math.factorial(2 * n) * math.factorial(3 * n)
        )
        lead = c_n * lam ** (2 * n) / FOUR_PI_SQ
        ratios.append(series.sine_pair_corr_series(n, lam) / lead)
    elapsed = time.perf_counter() - t0
    passed = all(0.98 <= r <= 1.02 for r in ratios)
    return CheckResult(
        "criterion 6: small-lambda leading constant (n=1,2,3 within 2%)",
        passed,
        f"ratios {[f'{r:.5f}' for r in ratios]}",
        elapsed,
    )


def criterion_7_identities(seed: int = 0) -> CheckResult:
    """Exact identity suite for n <= 20 plus the redundant float check,
    under 1 second."""
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 21):
        rep = matrices.identity_report(n)
        if not rep.passed:
            bad.append((n, [c.name for c in rep.failures()]))
        sysm = matrices.build_system(n)
        # float64 shadow of the exact checks, at 1e-12 relative to term size
        af = sysm.A @ sysm.f + 0.5 * (n + 1) * sysm.e
        if np.max(np.abs(af)) > 1e-12 * (n + 1):
            bad.append((n, ["A f float residual"]))
        for j in range(1, n):
            powers = sysm.b_diag ** (2 * j)
            scale = float(np.dot(np.abs(sysm.v), powers))
            if abs(float(np.dot(sysm.v, powers))) > 1e-12 * scale:
                bad.append((n, [f"v.B^{2*j}f float residual"]))
    elapsed = time.perf_counter() - t0
    passed = not bad and elapsed < 1.0
    return CheckResult(
        "criterion 7: identity suite exact for n <= 20",
        passed,
        f"failures {bad}" if bad else f"all exact, runtime {elapsed:.2f}s",
        elapsed,
    )


def criterion_8_decay(seed: int = 0) -> CheckResult:
    """Decay envelope at beta in {2, 4, 8}, lambda in {4, 8, 16, 32}: fitted
    constant finite, no upward ratio trend, precision gate satisfied."""
    _warm_kernel()
    t0 = time.perf_counter()
    details = []
    tables = {}
    ok = True
    for beta in (2.0, 4.0, 8.0):
        rep = sde.decay_report(beta, (4.0, 8.0, 16.0, 32.0), paths=40_000, master_seed=seed + 808)
        ok = ok and rep.passed
        details.append(f"beta={beta}: c={rep.fitted_c:.3g} {'ok' if rep.passed else 'TREND'}")
        table = CurveTable()
        for lam, dev, se_val, env in zip(rep.lambdas, rep.deviations, rep.stderrs, rep.envelopes):
            table.rows.append(
                CurveRow(lam, float(dev), float(se_val), "mc", beta, beta / 2.0, None, seed + 808, float(env))
            )
        tables[f"decay_beta{beta:g}"] = table
    elapsed = time.perf_counter() - t0
    passed = ok and elapsed < 600.0
    return CheckResult(
        "criterion 8: decay envelope (beta 2, 4, 8)",
        passed,
        "; ".join(details) + f", runtime {elapsed:.1f}s",
        elapsed,
        tables,
    )


def criterion_9_continuity(seed: int = 0) -> CheckResult:
    """Continuity smoke scan around the beta=2 and beta=4 anchors."""
    _warm_kernel()
    t0 = time.perf_counter()
    scan2 = sde.continuity_scan((1.75, 2.0, 2.25), math.pi, paths=3_000, master_seed=seed + 909)
    scan4 = sde.continuity_scan((3.75, 4.0, 4.25), 2.0, paths=3_000, master_seed=seed + 909)
    anchor2 = abs(scan2.values[1] - closed.sine2_rho2(math.pi)) <= 3.0 * scan2.stderrs[1]
    anchor4 = abs(scan4.values[1] - closed.sine4_rho2(2.0)) <= 3.0 * scan4.stderrs[1]
    elapsed = time.perf_counter() - t0
    passed = scan2.passed and scan4.passed and anchor2 and anchor4
    return CheckResult(
        "criterion 9: continuity smoke test around beta=2 and beta=4",
        passed,
        f"beta2 scan {scan2.passed} anchor {anchor2}; beta4 scan {scan4.passed} anchor {anchor4}",
        elapsed,
    )


def criterion_10_determinism(seed: int = 7) -> CheckResult:
    """Two CLI quick-suite runs with the same seed and different
    SINEBETA_THREADS produce byte-identical CSV outputs."""
    t0 = time.perf_counter()
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for i, threads in enumerate(("2", "1")):
            outdir = Path(tmp) / f"run{i}"
            env = dict(os.environ, SINEBETA_THREADS=threads)
            proc = subprocess.run(
                [
                    sys.executable,
                    "-m",
                    "sinebeta.cli",
                    "validate",
                    "--suite",
                    "quick",
                    "--seed",
                    str(seed),
                    "--out",
                    str(outdir),
                ],
                env=env,
                capture_output=True,
                text=True,
            )
            if proc.returncode != 0:
                return CheckResult(
                    "criterion 10: determinism across thread counts",
                    False,
                    f"quick suite exited {proc.returncode}: {proc.stdout[-400:]} {proc.stderr[-400:]}",
                    time.perf_counter() - t0,
                )
            outputs.append(
                {p.name: p.read_bytes() for p in sorted(outdir.glob("*.csv"))}
            )
    same = outputs[0].keys() == outputs[1].keys() and all(
        outputs[0][k] == outputs[1][k] for k in outputs[0]
    )
    elapsed = time.perf_counter() - t0
    return CheckResult(
        "criterion 10: determinism across thread counts (byte-identical CSV)",
        same,
        f"{len(outputs[0])} CSV files compared",
        elapsed,
    )


def criterion_11_triangle(seed: int = 0) -> CheckResult:
    """Engine triangle on (n, beta) in {(1,2), (2,4), (3,6)}: series and ODE
    agree to 1e-8 and MC agrees within 3 stderr at 5 lambda points each."""
    _warm_kernel()
    t0 = time.perf_counter()
    details = []
    ok = True
    cases = {
        (1, 2.0): (0.5, 2.0, math.pi, 5.0, 8.0),
        (2, 4.0): (0.5, 2.0, math.pi, 5.0, 8.0),
        (3, 6.0): (0.5, 1.0, 2.0, math.pi, 5.0),
    }
    for (n, beta), lams in cases.items():
        coeffs = series.get_coefficients(n, beta, max(lams), tol=1e-12)
        s_vals = np.array([series.hp_density_series(coeffs, lam) for lam in lams])
        run = ode.integrate_q(n, beta, np.array(lams), rtol=1e-10, atol=1e-12)
        o_vals = ode.hp_density_ode(run)
        se_err = float(np.max(np.abs(s_vals - o_vals)))
        cfg = sde.SdeConfig(
            beta=beta, delta=float(n), lambda_grid=lams, paths=40_000, master_seed=seed + 1111
        )
        table = sde.mc_hp_density(cfg)
        z = max(abs(row.value - sv) / row.stderr for row, sv in zip(table, s_vals))
        this_ok = se_err <= 1e-8 and z <= 3.0
        ok = ok and this_ok
        details.append(f"(n={n},beta={beta:g}): |series-ode| {se_err:.1e}, mc |z| {z:.2f}")
    elapsed = time.perf_counter() - t0
    return CheckResult(
        "criterion 11: engine triangle (series/ODE 1e-8, MC 3 stderr)",
        ok,
        "; ".join(details),
        elapsed,
    )


ACCEPTANCE_CRITERIA = [
    criterion_1_sine_kernel,
    criterion_2_beta4,
    criterion_3_mc_beta2,
    criterion_4_mc_beta4,
    criterion_5_mc_delta1,
    criterion_6_small_lambda,
    criterion_7_identities,
    criterion_8_decay,
    criterion_9_continuity,
    criterion_10_determinism,
    criterion_11_triangle,
]


# ---------------------------------------------------------------------------
# quick smoke suite


def _quick_sine_kernel(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 4 * math.pi, 101)
    coeffs = series.get_coefficients(1, 2.0, 4 * math.pi, tol=1e-12)
    vals = [series.sine_pair_corr_series(1, lam) for lam in grid]
    err = max(abs(v - closed.sine2_rho2(lam)) for lam, v in zip(grid, vals))
    return CheckResult(
        "series vs sine kernel (beta=2)",
        err <= 1e-10,
        f"max abs err {err:.2e}",
        time.perf_counter() - t0,
        {"sine_kernel": _series_rows(1, 2.0, grid, vals, coeffs)},
    )


def _quick_beta4(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 15.0, 31)
    coeffs = series.get_coefficients(2, 4.0, 15.0, tol=1e-12)
    s_vals = [series.hp_density_series(coeffs, lam) / (2.0 * math.pi) for lam in grid]
    run = ode.integrate_q(2, 4.0, grid, rtol=1e-10, atol=1e-12)
    o_vals = ode.sine_pair_corr_ode(run)
    exact = [closed.sine4_rho2(lam) for lam in grid]
    err_s = max(abs(a - b) for a, b in zip(s_vals, exact))
    err_o = max(abs(a - b) for a, b in zip(o_vals, exact))
    table = _series_rows(2, 4.0, grid, s_vals, coeffs)
    for lam, val in zip(grid, o_vals):
        table.rows.append(CurveRow(float(lam), float(val), None, "ode", 4.0, 2.0, run.seed_order, None, None))
    return CheckResult(
        "series and ODE vs beta=4 formula",
        err_s <= 1e-8 and err_o <= 1e-7,
        f"series err {err_s:.2e}, ode err {err_o:.2e}",
        time.perf_counter() - t0,
        {"beta4": table},
    )


def _quick_identities(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    bad = [n for n in range(1, 13) if not matrices.identity_report(n).passed]
    return CheckResult(
        "exact identities n <= 12",
        not bad,
        f"failures at n={bad}" if bad else "all exact",
        time.perf_counter() - t0,
    )


def _quick_small_lambda(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    ratios = []
    for n, lam in ((1, 0.05), (2, 0.05)):
        c_n = n ** (2 * n) * math.factorial(n) ** 3 / (
            math.factorial(2 * n) * math.factorial(3 * n)
        )
        ratios.append(series.sine_pair_corr_series(n, lam) / (c_n * lam ** (2 * n) / FOUR_PI_SQ))
    return CheckResult(
        "small-lambda constants (n=1,2)",
        all(0.98 <= r <= 1.02 for r in ratios),
        f"ratios {[f'{r:.5f}' for r in ratios]}",
        time.perf_counter() - t0,
    )


def _quick_mc_beta2(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    lams = (math.pi, 2 * math.pi)
    cfg = sde.SdeConfig(beta=2.0, delta=1.0, lambda_grid=lams, paths=20_000, master_seed=seed)
    table = sde.mc_pair_correlation(cfg)
    worst = 0.0
    for row, lam in zip(table, lams):
        gate = max(4.0 * row.stderr, 1e-3)
        worst = max(worst, abs(row.value - closed.sine2_rho2(lam)) / gate)
    return CheckResult(
        "MC vs sine kernel (20k paths smoke gate)",
        worst <= 1.0,
        f"worst err/gate {worst:.2f}",
        time.perf_counter() - t0,
        {"mc_beta2_quick": table},
    )


def _quick_mc_delta1(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    cfg = sde.SdeConfig(beta=3.0, delta=1.0, lambda_grid=(1.0,), paths=20_000, master_seed=seed + 1)
    table = sde.mc_hp_density(cfg)
    row = table.rows[0]
    exact = closed.hp_delta1_density(3.0, 1.0)
    gate = max(4.0 * row.stderr, 1e-3)
    return CheckResult(
        "MC vs delta=1 formula at beta=3",
        abs(row.value - exact) <= gate,
        f"err {abs(row.value - exact):.2e}, gate {gate:.2e}",
        time.perf_counter() - t0,
        {"mc_hp_beta3_quick": table},
    )


def _quick_replay(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    cfg = sde.SdeConfig(beta=2.0, delta=1.0, lambda_grid=(math.pi,), paths=2_000, master_seed=seed + 2)
    a = sde.mc_pair_correlation(cfg)
    b = sde.mc_pair_correlation(cfg)
    same = a.to_csv() == b.to_csv()
    return CheckResult(
        "bitwise replay of an identical config",
        same,
        "identical CSV" if same else "MISMATCH",
        time.perf_counter() - t0,
        {"mc_replay": a},
    )


QUICK_CHECKS = [
    _quick_sine_kernel,
    _quick_beta4,
    _quick_identities,
    _quick_small_lambda,
    _quick_mc_beta2,
    _quick_mc_delta1,
    _quick_replay,
]


def run_suite(suite: str, seed: int, outdir: str | os.PathLike) -> list[CheckResult]:
    """Run the named suite, writing one CSV per produced table plus a summary."""
    if suite == "quick":
        checks = QUICK_CHECKS
    elif suite == "full":
        checks = ACCEPTANCE_CRITERIA
    else:
        raise ValueError(f"unknown suite {suite!r}; choose 'quick' or 'full'")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for fn in checks:
        res = fn(seed=seed)
        results.append(res)
        for name, table in res.tables.items():
            table.write_csv(out / f"{name}.csv")
        print(res.line(), flush=True)
    summary = {
        "suite": suite,
        "seed": seed,
        "passed": bool(all(r.passed for r in results)),
        "results": [
            {
                "name": r.name,
                "passed": bool(r.passed),
                "detail": r.detail,
                "elapsed_s": round(r.elapsed, 3),
            }
            for r in results
        ],
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return results

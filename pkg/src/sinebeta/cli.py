"""Command-line front end.

Subcommands: rho2 (pair correlation), hpdensity (conditioned-process
density), validate (smoke or full acceptance suite), identities (exact
matrix identity checks), decay (large-lambda envelope check).

Exit codes: 0 success, 1 usage error, 2 validation failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import closed, matrices, ode, sde, series
from .special import coeff_tail_bound, pochhammer_ratio_seq
from .table import CurveRow, CurveTable

USAGE_ERROR = 1
VALIDATION_FAILURE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


class UsageError(ValueError):
    pass


def _lambda_grid(args) -> np.ndarray:
    if args.lambda_max <= args.lambda_min:
        raise UsageError("--lambda-max must exceed --lambda-min")
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    if args.spacing == "linear":
        return np.linspace(args.lambda_min, args.lambda_max, args.points)
    if args.lambda_min <= 0:
        raise UsageError("--spacing log requires --lambda-min > 0")
    return np.geomspace(args.lambda_min, args.lambda_max, args.points)


def _integer_order(delta: float, what: str) -> int:
    n = round(delta)
    if abs(delta - n) > 1e-12 or n < 1:
        raise UsageError(
            f"engine '{what}' requires an integer order: the power-series and ODE "
            f"representations exist only for integer delta (delta = beta/2 for rho2); "
            f"got delta = {delta}"
        )
    return int(n)


def _mc_rows(kind: str, beta: float, delta: float, grid, args) -> CurveTable:
    positive = tuple(float(x) for x in grid if x > 0)
    table = CurveTable()
    k_max = args.k_max if args.k_max == "auto" else int(args.k_max)
    if positive:
        cfg = sde.SdeConfig(
            beta=beta,
            delta=delta,
            lambda_grid=positive,
            eps_cut=args.eps_cut,
            dt=args.dt,
            paths=args.paths,
            master_seed=args.seed,
            k_max=k_max,
        )
        fn = sde.mc_pair_correlation if kind == "rho2" else sde.mc_hp_density
        table = fn(cfg)
    # alpha freezes at 0 for lambda = 0, so the moments are exactly 1 there
    zero_rows = []
    for lam in grid:
        if lam > 0:
            continue
        cfg0 = sde.SdeConfig(
            beta=beta, delta=delta, lambda_grid=(1.0,), paths=1, master_seed=args.seed, k_max=k_max
        )
        kk = cfg0.resolved_k_max()
        c = pochhammer_ratio_seq(delta, kk).values
        scale = 1.0 / (2.0 * math.pi**2) if kind == "rho2" else 1.0 / math.pi
        offset = 1.0 / (4.0 * math.pi**2) if kind == "rho2" else 1.0 / (2.0 * math.pi)
        zero_rows.append(
            CurveRow(
                lam=0.0,
                value=offset + scale * float(c.sum()),
                stderr=0.0,
                engine="mc",
                beta=beta,
                delta=delta,
                order=kk,
                seed=args.seed,
                tail_bound=scale * coeff_tail_bound(delta, kk + 1),
            )
        )
    table.rows = zero_rows + table.rows
    return table


def _series_rows(kind: str, beta: float, delta: float, grid) -> CurveTable:
    n = _integer_order(delta, "series")
    coeffs = series.get_coefficients(n, beta, max(float(grid[-1]), 1.0), tol=1e-12)
    table = CurveTable()
    for lam in grid:
        rho1 = series.hp_density_series(coeffs, float(lam))
        value = rho1 / (2.0 * math.pi) if kind == "rho2" else rho1
        table.rows.append(
            CurveRow(
                lam=float(lam),
                value=value,
                stderr=None,
                engine="series",
                beta=beta,
                delta=delta,
                order=coeffs.K,
                seed=None,
                tail_bound=coeffs.tail_at(float(lam)),
            )
        )
    return table


def _ode_rows(kind: str, beta: float, delta: float, grid) -> CurveTable:
    n = _integer_order(delta, "ode")
    run = ode.integrate_q(n, beta, np.asarray(grid, dtype=float), rtol=1e-10, atol=1e-12)
    vals = ode.hp_density_ode(run)
    if kind == "rho2":
        vals = vals / (2.0 * math.pi)
    table = CurveTable()
    for lam, val in zip(grid, vals):
        table.rows.append(
            CurveRow(
                lam=float(lam),
                value=float(val),
                stderr=None,
                engine="ode",
                beta=beta,
                delta=delta,
                order=run.seed_order,
                seed=None,
                tail_bound=None,
            )
        )
    return table


def _closed_rows(kind: str, beta: float, delta: float, grid) -> CurveTable:
    table = CurveTable()
    if kind == "rho2":
        if beta == 2.0:
            fn = closed.sine2_rho2
        elif beta == 4.0:
            fn = closed.sine4_rho2
        else:
            raise UsageError("engine 'closed' for rho2 exists only at beta = 2 or 4")
    else:
        if delta != 1.0:
            raise UsageError("engine 'closed' for hpdensity exists only at delta = 1")

        def fn(lam: float) -> float:
            return closed.hp_delta1_density(beta, lam)

    for lam in grid:
        table.rows.append(
            CurveRow(
                lam=float(lam),
                value=fn(float(lam)),
                stderr=None,
                engine="closed",
                beta=beta,
                delta=delta,
                order=None,
                seed=None,
                tail_bound=None,
            )
        )
    return table


def _curve_command(kind: str, args) -> int:
    beta = args.beta
    if kind == "rho2":
        delta = beta / 2.0 if args.delta is None else args.delta
        if delta != beta / 2.0:
            raise UsageError("rho2 requires delta = beta/2 (omit --delta to default to it)")
    else:
        if args.delta is None:
            raise UsageError("hpdensity requires an explicit --delta")
        delta = args.delta
    grid = _lambda_grid(args)

    engines = [args.engine] if args.engine != "all" else ["mc", "series", "ode", "closed"]
    table = CurveTable()
    for engine in engines:
        if args.engine == "all":
            # in 'all' mode, silently skip engines that do not exist for
            # these parameters rather than failing the whole run
            try:
                table.extend(_engine_rows(engine, kind, beta, delta, grid, args).rows)
            except UsageError:
                continue
        else:
            table.extend(_engine_rows(engine, kind, beta, delta, grid, args).rows)

    config = {
        "subcommand": kind,
        "engine": args.engine,
        "beta": beta,
        "delta": delta,
        "lambda_min": args.lambda_min,
        "lambda_max": args.lambda_max,
        "points": args.points,
        "spacing": args.spacing,
        "paths": args.paths,
        "dt": args.dt,
        "eps_cut": args.eps_cut,
        "k_max": args.k_max,
        "seed": args.seed,
        "output": args.output,
    }
    _emit(table, args, config)
    return 0


def _engine_rows(engine: str, kind: str, beta: float, delta: float, grid, args) -> CurveTable:
    if engine == "mc":
        return _mc_rows(kind, beta, delta, grid, args)
    if engine == "series":
        return _series_rows(kind, beta, delta, grid)
    if engine == "ode":
        return _ode_rows(kind, beta, delta, grid)
    if engine == "closed":
        return _closed_rows(kind, beta, delta, grid)
    raise UsageError(f"unknown engine {engine!r}")


def _emit(table: CurveTable, args, config: dict) -> None:
    if args.output == "csv":
        payload = table.to_csv()
    else:
        payload = table.to_json(config) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _identities_command(args) -> int:
    if not 1 <= args.n <= matrices.MAX_N_EXACT:
        raise UsageError(f"--n must lie in [1, {matrices.MAX_N_EXACT}]")
    all_ok = True
    for n in range(1, args.n + 1):
        rep = matrices.identity_report(n)
        all_ok = all_ok and rep.passed
        status = "pass" if rep.passed else "FAIL"
        print(f"n={n}: {status}")
        for check in rep.checks:
            mark = "ok " if check.passed else "BAD"
            line = f"  [{mark}] {check.name}"
            if check.detail:
                line += f" -- {check.detail}"
            print(line)
    return 0 if all_ok else VALIDATION_FAILURE


def _decay_command(args) -> int:
    lambdas = tuple(float(x) for x in args.lambdas.split(","))
    try:
        rep = sde.decay_report(
            args.beta, lambdas, paths=args.paths, dt=args.dt, master_seed=args.seed
        )
    except sde.PrecisionError as exc:
        print(f"FAIL (precision): {exc}", file=sys.stderr)
        return VALIDATION_FAILURE
    print(f"decay report beta={args.beta}: {'PASS' if rep.passed else 'FAIL'}; {rep.detail}")
    if args.out:
        table = CurveTable()
        for lam, dev, se_val, env in zip(rep.lambdas, rep.deviations, rep.stderrs, rep.envelopes):
            table.rows.append(
                CurveRow(lam, float(dev), float(se_val), "mc", args.beta, args.beta / 2.0, None, args.seed, float(env))
            )
        table.write_csv(args.out)
    return 0 if rep.passed else VALIDATION_FAILURE


def _validate_command(args) -> int:
    from . import validate as validate_mod

    results = validate_mod.run_suite(args.suite, args.seed, args.out)
    if all(r.passed for r in results):
        print("suite passed")
        return 0
    print("suite FAILED", file=sys.stderr)
    return VALIDATION_FAILURE


def _add_curve_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=float, required=True, help="inverse temperature beta > 0")
    p.add_argument(
        "--delta",
        type=float,
        default=None,
        help="conditioning exponent (rho2 defaults to beta/2; required for hpdensity)",
    )
    p.add_argument(
        "--engine",
        choices=["mc", "series", "ode", "closed", "all"],
        default="mc",
        help="computation engine (series/ode need integer order; closed needs a known formula)",
    )
    p.add_argument("--lambda-min", type=float, default=0.0)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    p.add_argument("--paths", type=int, default=200_000, help="MC path count")
    p.add_argument("--dt", type=float, default=1e-3, help="MC step size")
    p.add_argument("--eps-cut", type=float, default=1e-3, help="effective initial lambda at the cutoff")
    p.add_argument("--k-max", default="auto", help="moment truncation ('auto' or an integer)")
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--output", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")


def build_parser() -> _Parser:
    parser = _Parser(prog="sinebeta", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_rho2 = sub.add_parser("rho2", help="pair correlation of the bulk point process")
    _add_curve_args(p_rho2)
    p_hp = sub.add_parser("hpdensity", help="density of the conditioned process")
    _add_curve_args(p_hp)

    p_val = sub.add_parser("validate", help="run a validation suite")
    p_val.add_argument("--suite", choices=["quick", "full"], default="quick")
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--out", default="validate_out", help="directory for CSV outputs")

    p_id = sub.add_parser("identities", help="exact matrix identity checks")
    p_id.add_argument("--n", type=int, default=8, help="run the checks for all sizes up to n")

    p_dec = sub.add_parser("decay", help="large-lambda decay envelope check")
    p_dec.add_argument("--beta", type=float, required=True)
    p_dec.add_argument("--lambdas", default="4,8,16,32", help="comma-separated lambda list (>= 2)")
    p_dec.add_argument("--paths", type=int, default=40_000)
    p_dec.add_argument("--dt", type=float, default=1e-3)
    p_dec.add_argument("--seed", type=int, default=0)
    p_dec.add_argument("--out", default=None, help="CSV path for the deviations table")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "rho2":
            return _curve_command("rho2", args)
        if args.subcommand == "hpdensity":
            return _curve_command("hpdensity", args)
        if args.subcommand == "validate":
            return _validate_command(args)
        if args.subcommand == "identities":
            return _identities_command(args)
        if args.subcommand == "decay":
            return _decay_command(args)
    except UsageError as exc:
        print(f"sinebeta: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (sde.ConfigError, ValueError) as exc:
        print(f"sinebeta: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())

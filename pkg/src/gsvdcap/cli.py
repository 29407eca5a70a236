"""Command-line front end.

Subcommands: gsvd-check (factor invariants on random pairs), allocate
(one-shot closed-form allocation from matrix files), sweep-fraction and
sweep-snr (Monte Carlo campaigns writing CSV), oracle-verify (closed form
against the grid search). Results go to stdout or files; diagnostics go to
stderr. Exit codes: 0 success, 1 numerical/verification failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import experiments, linalg
from .allocation import solve_mu
from .capacity import secrecy_rate
from .experiments import ExperimentConfig
from .gsvd import ChannelPair, gsvd, subchannel_gains, verify_factors
from .oracle import grid_maximize, random_gains

RANGE_EPS = 1e-12


def parse_range(text):
    """Parse start:step:stop into an inclusive tuple of floats.

    stop is included when it lands within 1e-12 of a grid point; the last
    value is clamped to stop exactly so 0:0.01:1 really ends at 1.0.
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected start:step:stop, got {text!r}")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric range {text!r}") from None
    if not step > 0:
        raise argparse.ArgumentTypeError("range step must be positive")
    if stop < start:
        raise argparse.ArgumentTypeError("range stop must be >= start")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + RANGE_EPS:
            break
        values.append(min(v, stop))
        k += 1
    return tuple(values)


def _rho_range(text):
    values = parse_range(text)
    if values and (values[0] < 0 or values[-1] > 1):
        raise argparse.ArgumentTypeError("rho grid must lie in [0, 1]")
    return values


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonneg_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _add_dims(parser):
    parser.add_argument("--nt", type=_positive_int, required=True,
                        help="transmit antennas")
    parser.add_argument("--nr", type=_positive_int, required=True,
                        help="receiver antennas")
    parser.add_argument("--ne", type=_positive_int, required=True,
                        help="eavesdropper antennas")


def _add_sweep_common(parser):
    parser.add_argument("--trials", type=_positive_int, required=True)
    parser.add_argument("--seed", type=_nonneg_int, required=True)
    parser.add_argument("--sigma-r2", type=_nonneg_float, default=1.0,
                        help="receiver channel variance (default 1)")
    parser.add_argument("--sigma-e2", type=_nonneg_float, default=1.0,
                        help="eavesdropper channel variance (default 1)")
    parser.add_argument("--uniform-mode", choices=("transmit", "symbol"),
                        default="transmit",
                        help="equalize radiated power (transmit) or symbol "
                             "power (symbol) across directions")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--threads", type=_positive_int,
                        default=os.cpu_count() or 1,
                        help="worker threads (does not affect results)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gsvdcap",
        description="Secrecy capacity of the Gaussian MIMO wiretap channel "
                    "under GSVD beamforming.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gsvd-check",
                       help="verify factorization invariants on random pairs")
    _add_dims(p)
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    p.set_defaults(func=_cmd_gsvd_check)

    p = sub.add_parser("allocate",
                       help="closed-form allocation for explicit channels")
    p.add_argument("--hr", required=True, help="receiver channel JSON file")
    p.add_argument("--he", required=True, help="eavesdropper channel JSON file")
    p.add_argument("--power", type=_positive_float, required=True,
                   help="radiated power budget")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_allocate)

    p = sub.add_parser("sweep-fraction",
                       help="uniform-baseline rho sweep vs the optimum")
    _add_dims(p)
    p.add_argument("--power", type=_positive_float, required=True)
    p.add_argument("--rho-grid", type=_rho_range, default=parse_range("0:0.01:1"),
                   metavar="START:STEP:STOP")
    _add_sweep_common(p)
    p.set_defaults(func=_cmd_sweep_fraction)

    p = sub.add_parser("sweep-snr",
                       help="optimal vs secure-uniform rates across SNR")
    _add_dims(p)
    p.add_argument("--snr-db", type=parse_range, required=True,
                   metavar="START:STEP:STOP")
    _add_sweep_common(p)
    p.set_defaults(func=_cmd_sweep_snr)

    p = sub.add_parser("oracle-verify",
                       help="closed form vs grid search on synthetic gains")
    p.add_argument("--q", type=_positive_int, required=True)
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--budget", type=_positive_float, required=True)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--resolution", type=_positive_int, default=200)
    p.set_defaults(func=_cmd_oracle_verify)

    return parser


def _cmd_gsvd_check(args):
    config = ExperimentConfig(n_t=args.nt, n_r=args.nr, n_e=args.ne,
                              trials=args.trials, seed=args.seed)
    worst = 0.0
    failures = 0
    for trial in range(args.trials):
        channels = experiments.sample_channel(config, trial)
        check = verify_factors(gsvd(channels), channels, args.tol)
        worst = max(worst, check.max_residual)
        if not check.passed(args.tol):
            failures += 1
    print(f"checked {args.trials} pairs: worst residual {worst:.6e}")
    if failures:
        print(f"{failures}/{args.trials} pairs failed at tol {args.tol:g}",
              file=sys.stderr)
        return 1
    return 0


def _cmd_allocate(args):
    hr = linalg.load_matrix(args.hr)
    he = linalg.load_matrix(args.he)
    factors = gsvd(ChannelPair(hr=hr, he=he))
    gains = subchannel_gains(factors)
    alloc = solve_mu(gains, args.power)
    rate = secrecy_rate(gains, alloc)
    if args.json:
        payload = {
            "c": gains.c.tolist(),
            "d": gains.d.tolist(),
            "a": gains.a.tolist(),
            "p": alloc.p.tolist(),
            "mu": alloc.mu,
            "effective_power": alloc.effective_power,
            "rate_bits": rate,
        }
        json.dump(payload, sys.stdout)
        print()
        return 0
    print(f"{'i':>3} {'c_i':>14} {'d_i':>14} {'a_i':>14} {'p_i':>14}")
    for i in range(gains.q):
        print(f"{i:>3} {gains.c[i]:>14.6g} {gains.d[i]:>14.6g} "
              f"{gains.a[i]:>14.6g} {alloc.p[i]:>14.6g}")
    print(f"mu = {alloc.mu:.10g}")
    print(f"effective power = {alloc.effective_power:.10g} (budget {args.power:g})")
    print(f"secrecy rate = {rate:.10g} bits")
    return 0


def _cmd_sweep_fraction(args):
    config = ExperimentConfig(
        n_t=args.nt, n_r=args.nr, n_e=args.ne, sigma_r2=args.sigma_r2,
        sigma_e2=args.sigma_e2, budget=args.power, trials=args.trials,
        seed=args.seed, rho_grid=args.rho_grid)
    result = experiments.run_fraction_experiment(
        config, mode=args.uniform_mode, threads=args.threads)
    os.makedirs(args.out, exist_ok=True)
    trials_path = os.path.join(args.out, "fraction_trials.csv")
    agg_path = os.path.join(args.out, "fraction_aggregate.csv")
    experiments.write_csv(result.records, trials_path, "rho")
    experiments.write_aggregate_csv(result.aggregates, agg_path)
    best = int(np.argmax(result.curve.rate_bits))
    print(f"wrote {trials_path}", file=sys.stderr)
    print(f"wrote {agg_path}", file=sys.stderr)
    print(f"mean optimal rate {result.mean_optimal:.6g} bits; best uniform "
          f"rho {result.curve.param[best]:.4g} "
          f"({result.curve.rate_bits[best]:.6g} bits); "
          f"{result.resampled} resampled draws", file=sys.stderr)
    return 0


def _cmd_sweep_snr(args):
    config = ExperimentConfig(
        n_t=args.nt, n_r=args.nr, n_e=args.ne, sigma_r2=args.sigma_r2,
        sigma_e2=args.sigma_e2, trials=args.trials, seed=args.seed,
        snr_db_grid=args.snr_db)
    result = experiments.run_snr_sweep(
        config, mode=args.uniform_mode, threads=args.threads)
    os.makedirs(args.out, exist_ok=True)
    trials_path = os.path.join(args.out, "snr_trials.csv")
    agg_path = os.path.join(args.out, "snr_aggregate.csv")
    experiments.write_csv(result.records, trials_path, "snr_db")
    experiments.write_aggregate_csv(result.aggregates, agg_path)
    print(f"wrote {trials_path}", file=sys.stderr)
    print(f"wrote {agg_path}", file=sys.stderr)
    print(f"{result.resampled} resampled draws", file=sys.stderr)
    return 0


def _cmd_oracle_verify(args):
    worst = 0.0
    losses = 0
    for trial in range(args.trials):
        gains = random_gains(args.q, args.seed, trial)
        closed_rate = secrecy_rate(gains, solve_mu(gains, args.budget))
        _, grid_rate = grid_maximize(gains, args.budget, args.resolution)
        worst = max(worst, abs(closed_rate - grid_rate))
        if closed_rate < grid_rate - 1e-9:
            losses += 1
    print(f"{args.trials} instances: worst |closed - grid| = {worst:.6e} bits")
    if worst > 1e-3 or losses:
        print(f"verification failed: worst deviation {worst:.3e}, "
              f"{losses} instances where the grid beat the closed form",
              file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

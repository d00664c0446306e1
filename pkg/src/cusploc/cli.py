"""Command line entry points.

Subcommands: gamma, fbm, limit, simulate, estimate, rates, compare, report.
Exit codes: 0 success, 2 configuration error, 3 numerical or model error,
4 a configured acceptance threshold failed.
"""

import argparse
import csv
import os
import sys
from dataclasses import replace

import numpy as np

from . import harness
from .constants import gamma_for_model, gamma_star, gamma_star_sq, hurst
from .errors import NumericalError, SpecError
from .estimators import estimate
from .fbm import fbm_sample_exact_many, fbm_sample_ma_many, symmetric_grid
from .limit import limit_functionals, limit_moments
from .models import (
    EventRecord,
    Sample,
    Trajectory,
    simulate_dynamical,
    simulate_ergodic_diffusion,
    simulate_gaussian_signal,
    simulate_iid,
    simulate_poisson,
)


def _emit(out_dir, name, header, rows) -> None:
    if out_dir is None:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        for row in rows:
            writer.writerow([harness._cell(v) for v in row])
        return
    os.makedirs(out_dir, exist_ok=True)
    harness._write_csv(os.path.join(out_dir, name), header, rows)
    print(f"wrote {os.path.join(out_dir, name)}")


def _load_experiment(args) -> harness.ExperimentConfig:
    if not args.config:
        raise SpecError("this subcommand needs --config")
    config = harness.load_config(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    return config


def _cmd_gamma(args) -> int:
    if args.config:
        spec = _load_experiment(args).model
        k = spec.kappa
        rows = [(spec.variant, k, hurst(k), gamma_star_sq(k), gamma_star(k), gamma_for_model(spec))]
        _emit(args.out, "gamma.csv",
              ["variant", "kappa", "hurst", "gamma_star_sq", "gamma_star", "gamma"], rows)
        return 0
    if not args.kappa:
        raise SpecError("gamma needs --kappa values or --config")
    rows = [(k, hurst(k), gamma_star_sq(k), gamma_star(k)) for k in args.kappa]
    _emit(args.out, "gamma.csv", ["kappa", "hurst", "gamma_star_sq", "gamma_star"], rows)
    return 0


def _cmd_fbm(args) -> int:
    grid = symmetric_grid(args.hurst, args.half_width, args.points)
    seed = args.seed if args.seed is not None else 0
    if args.route == "exact":
        paths = fbm_sample_exact_many(grid, args.draws, seed)
    else:
        paths = fbm_sample_ma_many(grid, args.draws, seed)
    rows = [(d, float(u), float(v))
            for d in range(args.draws)
            for u, v in zip(grid.points, paths[d])]
    _emit(args.out, "fbm.csv", ["draw", "u", "value"], rows)
    return 0


def _cmd_limit(args) -> int:
    seed = args.seed if args.seed is not None else 0
    sample = limit_functionals(args.hurst, args.gamma, args.draws, seed)
    rows = list(zip(sample.xi_mle.tolist(), sample.xi_bayes.tolist()))
    _emit(args.out, "limit.csv", ["xi_mle", "xi_bayes"], rows)
    if args.moments:
        m = limit_moments(args.hurst, args.gamma, args.draws, seed)
        _emit(args.out, "limit_moments.csv",
              ["hurst", "gamma", "mean_sq_mle", "se_mle", "mean_sq_bayes", "se_bayes",
               "n_draws", "window"],
              [(args.hurst, args.gamma, m.mean_sq_mle, m.se_mle, m.mean_sq_bayes,
                m.se_bayes, m.n_draws, m.window)])
    return 0


def _cmd_simulate(args) -> int:
    if not args.config:
        raise SpecError("simulate needs --config")
    mapping = harness.load_config_mapping(args.config)
    config = harness.config_from_mapping(mapping)
    settings = harness.simulation_from_mapping(mapping.get("simulate", {}))
    seed = args.seed if args.seed is not None else settings.seed
    spec = config.model
    if spec.variant == "gaussian_signal":
        if spec.epsilon is None:
            raise SpecError("the model needs epsilon to simulate")
        step = settings.step or harness.observation_step(spec, spec.epsilon)
        data = simulate_gaussian_signal(spec, step, seed)
    elif spec.variant == "small_noise_dynamical":
        if spec.epsilon is None:
            raise SpecError("the model needs epsilon to simulate")
        horizon = settings.T if settings.T is not None else spec.T
        step = settings.step or harness.observation_step(spec, spec.epsilon)
        data = simulate_dynamical(spec, horizon, step, seed)
    elif spec.variant == "ergodic_diffusion":
        if settings.T is None:
            raise SpecError("simulating a diffusion needs simulate.T in the config")
        step = settings.step if settings.step is not None else 1e-3
        data = simulate_ergodic_diffusion(spec, settings.T, step=step, seed=seed)
    elif spec.variant == "iid_density":
        if settings.n is None:
            raise SpecError("simulating a sample needs simulate.n in the config")
        data = simulate_iid(spec, settings.n, seed)
    else:
        data = simulate_poisson(spec, seed)
    if isinstance(data, Trajectory):
        _emit(args.out, "data.csv", ["t", "X"],
              [(float(t), float(x)) for t, x in zip(data.times, data.values)])
    elif isinstance(data, EventRecord):
        _emit(args.out, "data.csv", ["event_time"], [(float(e),) for e in data.events])
    else:
        _emit(args.out, "data.csv", ["value"], [(float(v),) for v in data.values])
    return 0


def _read_data_csv(path):
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            rows = [row for row in reader if row]
    except OSError as exc:
        raise SpecError(f"cannot read data {path}: {exc}") from None
    if not header:
        raise SpecError(f"data file {path} is empty")
    try:
        columns = [np.array([float(row[j]) for row in rows]) for j in range(len(header))]
    except (ValueError, IndexError) as exc:
        raise SpecError(f"data file {path} has malformed rows: {exc}") from None
    return [name.strip() for name in header], columns


def _cmd_estimate(args) -> int:
    spec = _load_experiment(args).model
    header, columns = _read_data_csv(args.data)
    if header == ["t", "X"]:
        times, values = columns
        if times.size < 2:
            raise SpecError("a trajectory needs at least two rows")
        data = Trajectory(values=values, step=float(times[1] - times[0]), epsilon=spec.epsilon)
    elif header == ["event_time"]:
        data = EventRecord(events=columns[0], tau=spec.tau, n_periods=spec.n_periods)
    elif header == ["value"]:
        data = Sample(values=columns[0])
    else:
        raise SpecError(f"unrecognized data header {header}; expected t,X or event_time or value")
    prior_params = None
    if args.prior == "truncated_gaussian":
        if args.prior_mean is None or args.prior_sd is None:
            raise SpecError("the truncated_gaussian prior needs --prior-mean and --prior-sd")
        prior_params = {"mean": args.prior_mean, "sd": args.prior_sd}
    result = estimate(spec, data, prior=args.prior, prior_params=prior_params,
                      coarse_step=args.coarse_step, final_step=args.final_step)
    _emit(args.out, "estimate.csv",
          ["theta_mle", "theta_bayes", "grid_step_final", "loglik_at_mle"],
          [(result.theta_mle, result.theta_bayes, result.grid_step_final, result.loglik_at_mle)])
    return 0


def _cmd_rates(args) -> int:
    config = _load_experiment(args)
    result = harness.run_rate_experiment(config, workers=args.workers)
    out = args.out or config.outputs
    if out:
        os.makedirs(out, exist_ok=True)
        harness.write_rate_csv(result, os.path.join(out, "rates.csv"))
        harness.write_rate_fit_csv(result, os.path.join(out, "rates_fit.csv"))
    print(f"slope {result.slope:.4f} (stderr {result.slope_stderr:.4f}), "
          f"theoretical {result.theoretical_exponent:.4f}")
    tolerance = config.comparison.slope_tolerance if config.comparison else None
    if tolerance is not None and abs(result.slope - result.theoretical_exponent) > tolerance:
        print(f"slope deviates from {result.theoretical_exponent:.4f} by more than "
              f"{tolerance}", file=sys.stderr)
        return 4
    return 0


def _cmd_compare(args) -> int:
    config = _load_experiment(args)
    report = harness.run_limit_comparison(config, workers=args.workers)
    out = args.out or config.outputs
    if out:
        os.makedirs(out, exist_ok=True)
        harness.write_comparison_csv(report, os.path.join(out, "comparison.csv"))
    print(f"KS mle {report.ks_mle:.4f}, KS bayes {report.ks_bayes:.4f} "
          f"({report.n_errors} errors vs {report.n_limit} limit draws)")
    if report.passed is False:
        print(f"KS distance exceeds threshold {report.threshold}", file=sys.stderr)
        return 4
    return 0


def _cmd_report(args) -> int:
    rate_results = {}
    master = args.seed if args.seed is not None else 0
    out = args.out
    if args.config:
        config = _load_experiment(args)
        master = config.master_seed
        out = out or config.outputs
        rate_results[config.model.variant] = harness.run_rate_experiment(
            config, workers=args.workers)
    if not out:
        raise SpecError("report needs --out or an outputs path in the config")
    bundle = harness.build_default_report(
        master,
        moment_hursts=tuple(args.moment_hurst) if args.moment_hurst else (0.5, 0.6, 0.7, 0.8, 0.9),
        moment_draws=args.moment_draws,
        density_draws=args.density_draws,
        rate_results=rate_results,
    )
    paths = harness.emit_report(bundle, out)
    for path in paths:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config file (JSON)")
    common.add_argument("--seed", type=int, help="seed override")
    common.add_argument("--workers", type=int,
                        help="worker count (default: CUSPLOC_WORKERS, then 1)")
    common.add_argument("--out", help="output directory (default: stdout or config outputs)")
    parser = argparse.ArgumentParser(
        prog="cusploc",
        description="Cusp-location estimation: constants, simulators, estimators, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", parents=[common],
                       help="signal-shape constant and per-model gamma")
    p.add_argument("--kappa", type=float, action="append",
                   help="cusp exponent (repeatable)")
    p.set_defaults(handler=_cmd_gamma)

    p = sub.add_parser("fbm", parents=[common],
                       help="fractional Brownian motion draws on a symmetric grid")
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--half-width", type=float, default=2.0)
    p.add_argument("--points", type=int, default=16, help="grid points per side")
    p.add_argument("--draws", type=int, default=1)
    p.add_argument("--route", choices=("exact", "ma"), default="exact")
    p.set_defaults(handler=_cmd_fbm)

    p = sub.add_parser("limit", parents=[common],
                       help="limit-field argmax and posterior-mean draws")
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--moments", action="store_true", help="also write second moments")
    p.set_defaults(handler=_cmd_limit)

    p = sub.add_parser("simulate", parents=[common],
                       help="draw one data set from the configured model")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("estimate", parents=[common],
                       help="run the location estimators on a data CSV")
    p.add_argument("--data", required=True, help="input CSV (t,X / event_time / value)")
    p.add_argument("--prior", default="uniform")
    p.add_argument("--prior-mean", type=float)
    p.add_argument("--prior-sd", type=float)
    p.add_argument("--coarse-step", type=float)
    p.add_argument("--final-step", type=float)
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("rates", parents=[common],
                       help="RMSE rate sweep with a log-log slope fit")
    p.set_defaults(handler=_cmd_rates)

    p = sub.add_parser("compare", parents=[common],
                       help="normalized errors vs limit draws (two-sample KS)")
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("report", parents=[common],
                       help="emit the CSV + SVG report bundle")
    p.add_argument("--moment-hurst", type=float, action="append",
                   help="Hurst index for the moment curves (repeatable)")
    p.add_argument("--moment-draws", type=int, default=2000)
    p.add_argument("--density-draws", type=int, default=20000)
    p.set_defaults(handler=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.handler(args))
    except SpecError as exc:
        print(f"cusploc: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, OSError) as exc:
        print(f"cusploc: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())

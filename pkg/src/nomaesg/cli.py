"""Command line entry point: ``nomaesg {analytic,simulate,reproduce,sweep}``.

Failures exit with status 2 and a single JSON line on stderr::

    error: {"type": "GroupingError", "message": "..."}
"""

import argparse
import json
import sys

from .analytic_rates import (
    calibrate_power,
    esg_mimo,
    esg_mimo_high_snr,
    large_scale_near_far_gain,
    mimo_noma_asymptotic_rate,
    mimo_oma_ergodic_rate,
)
from .experiments import AXES, DEFAULT_TRIALS, build_figure_spec, run_experiment, spec_from_json
from .geometry import SystemConfig, validate_config
from .quadrature import build_quadrature, mean_channel_power_siso
from .simulator import monte_carlo_esg


def _common_flags():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="run seed (default 0)")
    parent.add_argument("--trials", type=int, default=None,
                        help=f"Monte Carlo trials per point (default {DEFAULT_TRIALS})")
    parent.add_argument("--out", default=None, help="output file")
    parent.add_argument("--quad-order", type=int, default=None,
                        help="Gauss-Chebyshev order N (default 100)")
    parent.add_argument("--workers", type=int, default=1, help="worker processes")
    return parent


def _point_flags(parser):
    defaults = SystemConfig()
    parser.add_argument("--d0", type=float, default=defaults.inner_radius_m, help="inner radius [m]")
    parser.add_argument("--d", type=float, default=defaults.outer_radius_m, help="outer radius [m]")
    parser.add_argument("--alpha", type=float, default=defaults.path_loss_exponent)
    parser.add_argument("--k", type=int, default=defaults.num_users, help="number of users")
    parser.add_argument("--m", type=int, default=defaults.num_antennas, help="BS antennas")
    parser.add_argument("--snr-db", type=float, default=defaults.snr_sum_db,
                        help="received sum SNR [dB]")
    parser.add_argument("--n0", type=float, default=defaults.noise_power, help="noise power")


def build_parser():
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="nomaesg", parents=[common],
        description="Ergodic sum-rate gain of uplink NOMA over OMA.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", parents=[common], help="closed-form rates at one point")
    _point_flags(p)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo ESG at one point")
    _point_flags(p)

    p = sub.add_parser("reproduce", parents=[common], help="regenerate a figure dataset")
    p.add_argument("--figure", required=True, help="figure id: 2, 3, 4 or 5")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="AXIS=V1[,V2...]",
                   help=f"replace a sweep axis; axes: {', '.join(AXES)}")

    p = sub.add_parser("sweep", parents=[common], help="run a custom sweep from JSON")
    p.add_argument("--config", required=True, help="sweep JSON file")
    return parser


def _config_from_args(args):
    cfg = SystemConfig(
        inner_radius_m=args.d0, outer_radius_m=args.d, path_loss_exponent=args.alpha,
        num_users=args.k, num_antennas=args.m,
        quadrature_order=args.quad_order if args.quad_order is not None else 100,
        noise_power=args.n0, snr_sum_db=args.snr_db)
    return validate_config(cfg)


def _parse_overrides(items):
    overrides = {}
    for item in items:
        name, sep, values = item.partition("=")
        if not sep or not values:
            raise ValueError(f"malformed --set {item!r}, expected AXIS=V1[,V2...]")
        overrides[name.strip()] = [v.strip() for v in values.split(",") if v.strip()]
    for name, values in overrides.items():
        if name in ("k", "m", "quad_order"):
            overrides[name] = [int(v) for v in values]
        else:
            overrides[name] = [float(v) for v in values]
    return overrides


def _emit(payload, out):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_analytic(args):
    cfg = _config_from_args(args)
    q = build_quadrature(cfg)
    m = cfg.num_antennas
    lb = calibrate_power(q, m, cfg.snr_sum_db, cfg.noise_power)
    _emit({
        "config": {a: getattr(cfg, f) for a, f in AXES.items()},
        "p_max": lb.p_max,
        "mean_channel_gain": mean_channel_power_siso(q),
        "noma_asymptotic_rate_nats": mimo_noma_asymptotic_rate(q, m, lb),
        "oma_ergodic_rate_nats": mimo_oma_ergodic_rate(q, m, lb),
        "analytic_esg_nats": esg_mimo(q, m, lb),
        "high_snr_esg_nats": esg_mimo_high_snr(q, m),
        "large_scale_gain_nats": large_scale_near_far_gain(q),
    }, args.out)


def _cmd_simulate(args):
    cfg = _config_from_args(args)
    trials = args.trials if args.trials is not None else DEFAULT_TRIALS
    est = monte_carlo_esg(cfg, trials, args.seed or 0, workers=args.workers)
    _emit({
        "config": {a: getattr(cfg, f) for a, f in AXES.items()},
        "scheme_pair": est.scheme_pair.value,
        "mc_esg_nats": est.mean_esg,
        "mc_stderr_nats": est.std_error,
        "noma_mean_nats": est.noma_mean,
        "oma_mean_nats": est.oma_mean,
        "p_max": est.p_max,
        "trials": est.trials,
        "seed": est.seed,
    }, args.out)


def _cmd_reproduce(args):
    overrides = _parse_overrides(args.overrides)
    if args.quad_order is not None:
        overrides["quad_order"] = [args.quad_order]
    out = args.out or f"fig{args.figure}.csv"
    spec = build_figure_spec(
        args.figure, overrides,
        trials=args.trials if args.trials is not None else DEFAULT_TRIALS,
        seed=args.seed or 0, output_path=out)
    run_experiment(spec, workers=args.workers)
    sys.stdout.write(f"wrote {len(spec.sweep)} rows to {out}\n")


def _cmd_sweep(args):
    out = args.out or "sweep.csv"
    spec = spec_from_json(args.config, trials=args.trials, seed=args.seed,
                          output_path=out, quad_order=args.quad_order)
    run_experiment(spec, workers=args.workers)
    sys.stdout.write(f"wrote {len(spec.sweep)} rows to {out}\n")


_COMMANDS = {
    "analytic": _cmd_analytic,
    "simulate": _cmd_simulate,
    "reproduce": _cmd_reproduce,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (ValueError, ArithmeticError, OSError, KeyError) as exc:
        line = json.dumps({"type": type(exc).__name__, "message": str(exc)})
        sys.stderr.write(f"error: {line}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

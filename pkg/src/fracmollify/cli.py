"""Command-line entry point: ``fracmollify <subcommand> [options]``.

Every run writes its effective configuration to ``<name>.config`` next to
the outputs, so ``--config <name>.config`` reproduces it.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import io
from .config import parse_config
from .errors import (
    BracketError,
    ConfigError,
    ConsistencyError,
    DomainError,
    IterationLimitError,
    NoiseConditionError,
)
from .experiments import (
    ReplicationError,
    convergence_study,
    exact_data,
    initial_condition,
    monte_carlo,
    run_example,
)
from .operators import forward_solve, regularized_backward, spectral_cutoff_backward
from .parameter_choice import morozov_geometric
from .verification import run_checks

log = logging.getLogger("fracmollify")

SUBCOMMANDS = ("forward", "backward", "example", "rates", "montecarlo", "verify")

_CONFIG_FLAGS = [
    ("gamma", float), ("T", float), ("L", float), ("N", int), ("tau", float),
    ("s", float), ("theta", float), ("q", float), ("alpha0", float),
    ("max_iters", int), ("seed", int), ("output_dir", str), ("h", float),
]


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--env-override", action="store_true",
                        help="let FRACMOLLIFY_* environment variables override file and flags")
    common.add_argument("-v", "--verbose", action="store_true")
    for key, kind in _CONFIG_FLAGS:
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=kind, default=None)

    parser = argparse.ArgumentParser(
        prog="fracmollify",
        description="Mollification for the backward time-fractional diffusion problem.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser("forward", parents=[common], help="evolve a field to time t")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="field file")
    src.add_argument("--id", type=int, help="benchmark example initial state")
    p.add_argument("--t", type=float, default=None, help="target time (default T)")
    p.add_argument("--name", default="forward")

    p = sub.add_parser("backward", parents=[common], help="regularised reconstruction from final data")
    p.add_argument("--input", required=True, help="final-time data field")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--alpha", type=float, help="fixed regularisation parameter")
    p.add_argument("--delta", type=float, help="noise level; alpha by discrepancy search")
    p.add_argument("--method", choices=("mollifier", "cutoff"), default="mollifier")
    p.add_argument("--xi-max", type=float, help="band limit for --method cutoff")
    p.add_argument("--name", default="backward")

    p = sub.add_parser("example", parents=[common], help="single benchmark run")
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--perc-noise", type=float, default=1.0)
    p.add_argument("--alpha-fixed", type=float, help="skip the discrepancy search")
    p.add_argument("--fine-data", action="store_true", help="synthesise data on a 2x finer grid")

    p = sub.add_parser("rates", parents=[common], help="log-log convergence study")
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--levels", type=_float_list, default=[4, 2, 1, 0.5, 0.25])
    p.add_argument("--seeds", type=_int_list, help="default: seed, seed+1, seed+2")

    p = sub.add_parser("montecarlo", parents=[common], help="replicated runs with fresh noise")
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--perc-noise", type=float, default=1.0)
    p.add_argument("--n-reps", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)

    sub.add_parser("verify", parents=[common], help="special-function and bound self-checks")
    return parser


def _config_from_args(args):
    flags = {key: getattr(args, key) for key, _ in _CONFIG_FLAGS}
    return parse_config(args.config, flags, env_override=args.env_override)


def _out(cfg, name):
    return os.path.join(cfg.output_dir, name)


def _write_config(cfg, name):
    path = _out(cfg, name + ".config")
    os.makedirs(cfg.output_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(cfg.to_text())


def _central_slice(field):
    grid = field.grid
    values = field.values
    if grid.n_dims == 2:
        values = values[:, grid.N // 2]
    return grid.nodes, values


def cmd_forward(args, cfg):
    if args.input:
        u0 = io.read_field(args.input)
    else:
        u0 = initial_condition(args.id, cfg.grid)
    t = cfg.T if args.t is None else args.t
    out = forward_solve(u0, cfg.model, t)
    io.write_field(_out(cfg, args.name + ".csv"), out)
    io.write_plot_data(_out(cfg, args.name + "_slice.dat"), *_central_slice(out))
    _write_config(cfg, args.name)
    print(f"wrote {_out(cfg, args.name + '.csv')}")


def cmd_backward(args, cfg):
    g = io.read_field(args.input)
    if args.method == "cutoff":
        if args.xi_max is None:
            raise DomainError("--method cutoff needs --xi-max")
        out = spectral_cutoff_backward(g, args.xi_max, cfg.model, args.t)
        alpha = None
    else:
        if args.alpha is not None:
            alpha = args.alpha
        elif args.delta is not None:
            alpha = morozov_geometric(g, args.delta, cfg.mollifier, cfg.morozov)
        else:
            raise DomainError("backward needs --alpha or --delta")
        out = regularized_backward(g, alpha, cfg.model, cfg.mollifier, args.t)
    io.write_field(_out(cfg, args.name + ".csv"), out)
    io.write_plot_data(_out(cfg, args.name + "_slice.dat"), *_central_slice(out))
    _write_config(cfg, args.name)
    if alpha is not None:
        print(f"alpha = {alpha!r}")
    print(f"wrote {_out(cfg, args.name + '.csv')}")


REPORT_COLUMNS = ("schema", "example", "perc_noise", "seed", "delta", "alpha", "rel_err")


def cmd_example(args, cfg):
    report, recon = run_example(args.id, args.perc_noise, cfg.seed, cfg,
                                alpha_fixed=args.alpha_fixed, fine_data=args.fine_data)
    name = f"example_{args.id}"
    row = {"schema": io.SCHEMA, **{k: getattr(report, k) for k in REPORT_COLUMNS[1:]}}
    io.write_csv(_out(cfg, name + ".csv"), REPORT_COLUMNS, [row])
    io.write_field(_out(cfg, name + "_recon.csv"), recon)
    x, y = _central_slice(recon)
    io.write_plot_data(_out(cfg, name + "_slice.dat"), x, y)
    u0, _ = exact_data(args.id, cfg.grid, cfg.exact_model)
    io.write_plot_data(_out(cfg, name + "_truth_slice.dat"), *_central_slice(u0))
    _write_config(cfg, name)
    print(f"example {args.id}: perc_noise={report.perc_noise:g}% delta={report.delta:.6g} "
          f"alpha={report.alpha:.6g} rel_err={report.rel_err:.6g} ({report.elapsed:.2f}s)")


RATES_COLUMNS = ("schema", "example", "n_levels", "slope", "intercept", "r_squared")


def cmd_rates(args, cfg):
    seeds = args.seeds or [cfg.seed, cfg.seed + 1, cfg.seed + 2]
    rep = convergence_study(args.id, args.levels, seeds, cfg)
    name = f"rates_{args.id}"
    row = {"schema": io.SCHEMA, "example": args.id, "n_levels": len(rep.points),
           "slope": rep.slope, "intercept": rep.intercept, "r_squared": rep.r_squared}
    io.write_csv(_out(cfg, name + ".csv"), RATES_COLUMNS, [row])
    io.write_plot_data(_out(cfg, name + ".dat"), [p[0] for p in rep.points], [p[1] for p in rep.points])
    _write_config(cfg, name)
    print(f"example {args.id}: slope={rep.slope:.4f} r^2={rep.r_squared:.4f}")


MC_COLUMNS = ("schema", "example", "perc_noise", "n_reps", "base_seed",
              "mean_rel_err", "var_rel_err", "mean_alpha")


def cmd_montecarlo(args, cfg):
    summary = monte_carlo(args.id, args.perc_noise, args.n_reps, cfg.seed, cfg, workers=args.workers)
    name = f"montecarlo_{args.id}"
    row = {"schema": io.SCHEMA, "example": args.id, "perc_noise": float(args.perc_noise),
           "n_reps": summary.n_reps, "base_seed": cfg.seed, "mean_rel_err": summary.mean_rel_err,
           "var_rel_err": summary.var_rel_err, "mean_alpha": summary.mean_alpha}
    io.write_csv(_out(cfg, name + ".csv"), MC_COLUMNS, [row])
    seeds = np.arange(cfg.seed, cfg.seed + summary.n_reps)
    io.write_plot_data(_out(cfg, name + "_reps.dat"), seeds, summary.rel_errs)
    _write_config(cfg, name)
    print(f"example {args.id}: mean rel_err={summary.mean_rel_err:.6g} "
          f"var={summary.var_rel_err:.3e} mean alpha={summary.mean_alpha:.6g}")


def cmd_verify(args, cfg):
    checks = run_checks()
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


_COMMANDS = {
    "forward": cmd_forward,
    "backward": cmd_backward,
    "example": cmd_example,
    "rates": cmd_rates,
    "montecarlo": cmd_montecarlo,
    "verify": cmd_verify,
}

# exit status per error category
_CATEGORIES = [
    (ConfigError, "config", 2),
    (NoiseConditionError, "noise-condition", 3),
    (DomainError, "domain", 3),
    (IterationLimitError, "iteration-limit", 4),
    (BracketError, "bracket", 4),
    (ConsistencyError, "consistency", 4),
    (ReplicationError, "replication", 4),
    (OSError, "io", 5),
]


def _raising_module(exc):
    tb = exc.__traceback__
    name = "fracmollify"
    while tb is not None:
        name = tb.tb_frame.f_globals.get("__name__", name)
        tb = tb.tb_next
    return name


def dispatch(command, args, cfg):
    if command not in _COMMANDS:
        raise ConfigError(f"unknown subcommand {command!r}; expected one of {', '.join(SUBCOMMANDS)}")
    return _COMMANDS[command](args, cfg) or 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config_from_args(args)
        return dispatch(args.command, args, cfg)
    except Exception as exc:
        for kind, category, status in _CATEGORIES:
            if isinstance(exc, kind):
                module = _raising_module(exc)
                print(f"error [{category}] {module}: {exc}", file=sys.stderr)
                return status
        raise


if __name__ == "__main__":
    sys.exit(main())

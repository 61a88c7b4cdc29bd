"""Command line front end.

Subcommands: simulate a model, fit a null family by conditional least
squares, run the bootstrap goodness-of-fit test, and drive a Monte Carlo
experiment from a TOML config. All outputs are deterministic given the
flags: fixed seeds, sorted JSON keys, repr-precision CSV floats.

Exit codes: 0 on success, 2 on bad input or usage, 3 when estimation
degenerates (constant or collinear series) or too many harness
repetitions fail.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .bootstrap import TestConfig, bootstrap_test
from .estimate import DegenerateSeries, fit_family
from .mc import (HarnessAbort, emit_power_curve, load_config, run_experiment,
                 write_summary)
from .models import model_from_dict, read_series, simulate, write_series
from .pgf import FAMILIES
from .statistic import ROUTES

# flags a model table may consume, keyed by destination name
_MODEL_KEYS = ("p", "p1", "p2", "theta1", "theta2", "delta", "phi", "r")
_INNOV_KEYS = ("theta", "r", "phi", "lam1", "lam2", "lam")

# which model kinds take an innovation table at all
_NEEDS_INNOVATION = {"inar1", "inar2"}

_MODEL_PARAMS = {
    "inar1": ("p",),
    "inar2": ("p1", "p2"),
    "inarch1": ("theta1", "theta2", "r"),
    "ingarch11": ("theta1", "theta2", "delta"),
    "inarch1-level-shift": ("theta1", "theta2", "delta", "phi"),
}
_INNOV_PARAMS = {
    "poisson": ("theta",),
    "negbin": ("theta", "r"),
    "poisson-mixture": ("phi", "lam1", "lam2"),
    "dirac-mixture": ("phi", "lam"),
}
# inarch1's r is optional; every other listed parameter is required
_OPTIONAL = {("inarch1", "r")}


def _build_model(args) -> object:
    """Assemble the model dict from flags, rejecting unused ones."""
    kind = args.model
    if kind not in _MODEL_PARAMS:
        raise ValueError(f"unknown model kind {kind!r}")
    table = {"kind": kind}
    used = set()
    for key in _MODEL_PARAMS[kind]:
        value = getattr(args, key)
        if value is None:
            if (kind, key) in _OPTIONAL:
                continue
            raise ValueError(f"model {kind!r} requires --{key}")
        table[key] = value
        used.add(key)

    if kind in _NEEDS_INNOVATION:
        innov_kind = args.innovation
        innov = {"kind": innov_kind}
        for key in _INNOV_PARAMS[innov_kind]:
            value = getattr(args, key)
            if value is None:
                flag = key.replace("lam", "lambda") if key.startswith("lam") else key
                raise ValueError(f"innovation {innov_kind!r} requires --{flag}")
            innov[key] = value
            used.add(key)
        table["innovation"] = innov

    for key in set(_MODEL_KEYS) | set(_INNOV_KEYS):
        if getattr(args, key, None) is not None and key not in used:
            flag = key.replace("lam", "lambda") if key.startswith("lam") else key
            raise ValueError(f"--{flag} is not a parameter of model {kind!r}")
    return model_from_dict(table)


def _cmd_simulate(args) -> int:
    model = _build_model(args)
    series = simulate(model, args.T, seed=args.seed, burn_in=args.burn_in)
    if args.out is None or args.out == "-":
        sys.stdout.write("y\n")
        for v in series.values:
            sys.stdout.write(f"{int(v)}\n")
    else:
        write_series(series, args.out)
    return 0


def _cmd_fit(args) -> int:
    series = read_series(args.path)
    fit = fit_family(series, args.model)
    json.dump(fit.to_dict(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_gof(args) -> int:
    series = read_series(args.path)
    config = TestConfig(family=args.null, a=args.a, B=args.B, seed=args.seed,
                        burn_in=args.burn_in, route=args.route,
                        threads=args.threads)
    result = bootstrap_test(series, config)
    json.dump(result.to_dict(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_mc(args) -> int:
    config = load_config(args.config)
    if args.threads is not None:
        config = dataclasses.replace(config, threads=args.threads)
    result = run_experiment(config)
    emit_power_curve(result, args.out)
    summary = args.summary
    if summary is None:
        out = str(args.out)
        summary = (out[: -len(".csv")] if out.endswith(".csv") else out) + ".json"
    write_summary(result, summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="countgof",
        description="Goodness-of-fit tests for count time series via the "
                    "probability generating function.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a count model to CSV")
    sim.add_argument("--model", required=True,
                     choices=sorted(_MODEL_PARAMS), help="model kind")
    sim.add_argument("--T", type=int, required=True, help="series length")
    sim.add_argument("--seed", type=int, required=True, help="RNG seed")
    sim.add_argument("--burn-in", type=int, default=500, dest="burn_in")
    sim.add_argument("--innovation", default="poisson",
                     choices=sorted(_INNOV_PARAMS),
                     help="innovation law for thinning models")
    for key in ("p", "p1", "p2", "theta1", "theta2", "delta", "phi", "r",
                "theta", "lam1", "lam2", "lam"):
        flag = "--" + (key.replace("lam", "lambda") if key.startswith("lam")
                       else key)
        sim.add_argument(flag, dest=key, type=float, default=None)
    sim.add_argument("--out", default=None,
                     help="output CSV path (default stdout)")
    sim.set_defaults(func=_cmd_simulate)

    fit = sub.add_parser("fit", help="conditional least squares fit")
    fit.add_argument("--model", required=True, choices=sorted(FAMILIES),
                     help="null family")
    fit.add_argument("path", help="input CSV (one count per line)")
    fit.set_defaults(func=_cmd_fit)

    gof = sub.add_parser("gof", help="bootstrap goodness-of-fit test")
    gof.add_argument("--null", required=True, choices=sorted(FAMILIES),
                     help="null family")
    gof.add_argument("--a", type=float, default=1.0,
                     help="weight exponent (default 1)")
    gof.add_argument("--B", type=int, default=499,
                     help="bootstrap replicates (default 499)")
    gof.add_argument("--seed", type=int, required=True, help="RNG seed")
    gof.add_argument("--route", default="auto", choices=sorted(ROUTES))
    gof.add_argument("--burn-in", type=int, default=500, dest="burn_in")
    gof.add_argument("--threads", type=int, default=1)
    gof.add_argument("path", help="input CSV (one count per line)")
    gof.set_defaults(func=_cmd_gof)

    mc = sub.add_parser("mc", help="run a Monte Carlo experiment")
    mc.add_argument("--config", required=True, help="TOML experiment config")
    mc.add_argument("--out", required=True, help="rates CSV path")
    mc.add_argument("--summary", default=None,
                    help="JSON summary path (default: out with .json)")
    mc.add_argument("--threads", type=int, default=None,
                    help="override the config thread count")
    mc.set_defaults(func=_cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateSeries, HarnessAbort) as exc:
        print(f"countgof: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"countgof: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Power of the bootstrap test against the standard alternative menu.

Four alternatives per null family, all with the stationary mean matched to
the null (marginal mean 10):

  poisson-inar1 null (p=0.6, theta=4 under the null):
    negbin-r2, negbin-r5   INAR(1), Negative Binomial innovations
    mix-03, mix-05         INAR(1), two-Poisson mixture innovations
                           (lambda1=6, mean held at 4)
    dirac-01, dirac-03     INAR(1), Dirac-at-0/Poisson mixture innovations
    inarch1                Poisson INARCH(1) model deviation

  poisson-inarch1 null (theta1=4, theta2=0.6 under the null):
    nbinarch-r10, nbinarch-r40   Negative Binomial conditionals
    inar1                        Poisson INAR(1) model deviation
    ingarch11                    Poisson INGARCH(1,1)
    levelshift-4-01, levelshift-8-03   intensity jump of delta at
                                 ceil(phi*T)

Desk scale by default (200 repetitions, B = 199, T = 100); --full uses the
study scale (500 repetitions, B = 499, T in {100, 250, 500}).
"""

import argparse
import pathlib
import sys

from countgof.mc import MCConfig, emit_power_curve, run_experiment, write_summary
from countgof.models import (DiracZeroMixture, Inar1, Inarch1,
                             Inarch1LevelShift, Ingarch11, NegBinomial,
                             Poisson, PoissonMixture)
from countgof.pgf import INAR1, INARCH1

# two-Poisson mixtures with lambda1 = 6 and overall mean 4
_MIX_03 = PoissonMixture(0.3, 6.0, (4.0 - 0.3 * 6.0) / 0.7)
_MIX_05 = PoissonMixture(0.5, 6.0, 2.0)

ALTERNATIVES = {
    INAR1: {
        "negbin-r2": Inar1(0.6, NegBinomial(4.0, 2.0)),
        "negbin-r5": Inar1(0.6, NegBinomial(4.0, 5.0)),
        "mix-03": Inar1(0.6, _MIX_03),
        "mix-05": Inar1(0.6, _MIX_05),
        "dirac-01": Inar1(0.6, DiracZeroMixture(0.1, 4.0 / 0.9)),
        "dirac-03": Inar1(0.6, DiracZeroMixture(0.3, 4.0 / 0.7)),
        "inarch1": Inarch1(4.0, 0.6),
    },
    INARCH1: {
        "nbinarch-r10": Inarch1(4.0, 0.6, r=10.0),
        "nbinarch-r40": Inarch1(4.0, 0.6, r=40.0),
        "inar1": Inar1(0.6, Poisson(4.0)),
        "ingarch11": Ingarch11(4.0, 0.3, 0.3),
        "levelshift-4-01": Inarch1LevelShift(4.0, 0.6, 4.0, 0.1),
        "levelshift-8-03": Inarch1LevelShift(4.0, 0.6, 8.0, 0.3),
    },
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--null", choices=("inar1", "inarch1"), required=True)
    ap.add_argument("--alternative", default=None,
                    help="run one named alternative (default: all)")
    ap.add_argument("--out-dir", default="results", type=pathlib.Path)
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--seed", type=int, default=20240902)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    family = INAR1 if args.null == "inar1" else INARCH1
    menu = ALTERNATIVES[family]
    if args.alternative is not None and args.alternative not in menu:
        ap.error(f"unknown alternative {args.alternative!r}; "
                 f"choose from {sorted(menu)}")
    names = [args.alternative] if args.alternative else sorted(menu)

    if args.full:
        T, a, B, R = (100, 250, 500), (0.0, 1.0, 2.0, 5.0), 499, 500
    else:
        T, a, B, R = (100,), (0.0, 1.0), 199, 200

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name in names:
        cfg = MCConfig(truth=menu[name], null_family=family, T=T, a=a,
                       alpha=(0.01, 0.02, 0.05, 0.10), B=B, repetitions=R,
                       seed=args.seed, threads=args.threads)
        print(f"power of {family} test vs {name}: R={R}, B={B}, T={T} ...",
              flush=True)
        result = run_experiment(cfg)
        csv = args.out_dir / f"power_{args.null}_{name}.csv"
        emit_power_curve(result, csv)
        write_summary(result, csv.with_suffix(".json"))
        print(f"  wrote {csv} ({result.elapsed_seconds:.1f}s, "
              f"{result.redraws} redraws)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

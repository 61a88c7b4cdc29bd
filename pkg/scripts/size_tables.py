#!/usr/bin/env python3
"""Size of the bootstrap test under all three null families.

Desk scale by default (300 repetitions, B = 199, T in {50, 100}); pass
--full for the study scale (500 repetitions, B = 499, T up to 500, the
full weight grid). Writes one rate CSV and one JSON summary per family
into --out-dir.
"""

import argparse
import pathlib
import sys

from countgof.mc import MCConfig, emit_power_curve, run_experiment, write_summary
from countgof.models import Inar1, Inar2, Inarch1, Poisson
from countgof.pgf import INAR1, INAR2, INARCH1

NULLS = {
    "inar1": (Inar1(0.6, Poisson(4.0)), INAR1),
    "inarch1": (Inarch1(4.0, 0.6), INARCH1),
    "inar2": (Inar2(0.3, 0.2, Poisson(5.0)), INAR2),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results", type=pathlib.Path)
    ap.add_argument("--full", action="store_true",
                    help="study scale: R=500, B=499, T up to 500")
    ap.add_argument("--seed", type=int, default=20240901)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--only", choices=sorted(NULLS), default=None,
                    help="run a single family")
    args = ap.parse_args(argv)

    if args.full:
        T, a, B, R = (50, 100, 250, 500), (0.0, 1.0, 2.0, 5.0), 499, 500
    else:
        T, a, B, R = (50, 100), (0.0, 1.0), 199, 300

    args.out_dir.mkdir(parents=True, exist_ok=True)
    names = [args.only] if args.only else sorted(NULLS)
    for name in names:
        truth, family = NULLS[name]
        cfg = MCConfig(truth=truth, null_family=family, T=T, a=a,
                       alpha=(0.01, 0.05, 0.10), B=B, repetitions=R,
                       seed=args.seed, threads=args.threads)
        print(f"size under {family}: R={R}, B={B}, T={T} ...",
              flush=True)
        result = run_experiment(cfg)
        csv = args.out_dir / f"size_{name}.csv"
        emit_power_curve(result, csv)
        write_summary(result, csv.with_suffix(".json"))
        print(f"  wrote {csv} ({result.elapsed_seconds:.1f}s, "
              f"{result.redraws} redraws)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

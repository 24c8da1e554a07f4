"""Two-point prior experiments: wrong-sign rate and Bayes error across m.

    python3 scripts/lowerbound_witness.py --case 1 --n 10000 --trials 2000
    python3 scripts/lowerbound_witness.py --case 2 --n 10000 --trials 500

With the sign error held near a constant, the Bayes error tracks L, which
falls like m^-2 under Case 1 and m^-(2/3) under Case 2. The fitted slope of
the Bayes error in m is printed next to that prediction.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from entangled.harness.io import LOWERBOUND_HEADER, lowerbound_csv
from entangled.instances import OutOfRangeWarning, case1_params, case2_params
from entangled.lowerbound import run_sign_error_experiment

PREDICTED = {1: -2.0, 2: -2.0 / 3.0}


def default_ms(case: int, n: int, points: int) -> list[int]:
    if case == 1:
        lo, hi = 2 * math.log(n), max(4 * math.log(n), n**0.25)
    else:
        lo, hi = n**0.25, n**0.5
    return sorted({math.ceil(v) for v in np.geomspace(lo, hi, points)})


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--case", type=int, choices=(1, 2), default=1)
    ap.add_argument("--n", type=int, default=10**4)
    ap.add_argument("--m", type=int, nargs="*", help="m values (default: a log grid over the case's range)")
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--c-sigma", type=float, default=10.0)
    ap.add_argument("--c-l", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    build = case1_params if args.case == 1 else case2_params
    ms = args.m or default_ms(args.case, args.n, args.points)
    out = sys.stdout
    out.write(",".join(LOWERBOUND_HEADER) + "\n")
    xs, ys = [], []
    for m in ms:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OutOfRangeWarning)
            prior = build(args.n, m, C_sigma=args.c_sigma, c_L=args.c_l)
        res = run_sign_error_experiment(prior, args.n, args.trials, args.seed, threads=args.threads)
        record = dict(
            n=args.n, m=m, case=args.case, C_sigma=args.c_sigma, c_L=args.c_l,
            wrong_rate=res.wrong_sign_rate, bayes_error=res.bayes_expected_error,
            L=prior.L, ci=res.ci_halfwidth, seed=args.seed,
        )
        out.write(lowerbound_csv(record).splitlines()[-1] + "\n")
        if res.bayes_expected_error > 0:
            xs.append(m)
            ys.append(res.bayes_expected_error)
    if len(set(xs)) >= 3:
        slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
        print(
            f"bayes error vs m: slope {slope:+.3f}, predicted {PREDICTED[args.case]:+.3f}",
            file=sys.stderr,
        )


if __name__ == "__main__":
    main()

"""Fix n, vary the number of signals m, and fit the exponent of the error in m.

    python3 scripts/m_sweep.py --n 4096 --trials 100

The upper bound predicts slope -1 for the iterative truncation estimator.
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from entangled.harness import MRule, SweepConfig, fit_scaling_exponent, run_error_sweep, write_rows
from entangled.instances import NoiseConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--points", type=int, default=6)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--noise", type=float, default=1e6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    n = args.n
    # from the threshold sqrt(n ln n) up to n
    lo = math.ceil(math.sqrt(n * math.log(n)))
    ms = sorted({int(round(v)) for v in np.geomspace(lo, n, args.points)})
    rows = []
    for m in ms:
        cfg = SweepConfig(
            n_grid=(n,),
            m_rule=MRule("fixed", m),
            estimators=("iter_trunc", "median"),
            noise=NoiseConfig.constant(args.noise),
            trials=args.trials,
            seed=args.seed,
            step_budget=10**11,
        )
        rows += run_error_sweep(cfg, threads=args.threads)
    for est in ("iter_trunc", "median"):
        sub = [r for r in rows if r.estimator == est]
        slope, r2 = fit_scaling_exponent(sub, "m")
        errs = ", ".join(f"m={r.m}: {r.median_abs_err:.3g}" for r in sub)
        print(f"{est}: {errs}")
        print(f"  slope in m {slope:+.3f} (r2 {r2:.3f})")
    if args.out:
        write_rows(rows, args.out)


if __name__ == "__main__":
    main()

"""Run an error sweep from a JSON config and summarise it against sqrt(n ln n)/m.

    python3 scripts/upper_bound_scaling.py scripts/configs/threshold.json --threads 4

Writes the CSV (and its .meta.json) to the config's ``out`` path, then prints
per-cell ratios and, for each estimator, the log-log slope of the median
error against n.
"""

from __future__ import annotations

import argparse
import dataclasses
from pathlib import Path

from entangled.errors import DegenerateFitError
from entangled.harness import fit_scaling_exponent, load_config, run_error_sweep_detailed, write_rows
from entangled.harness.sweep import write_meta


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--trials", type=int, help="override the config's trial count")
    ap.add_argument("--out", help="override the config's output path")
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.trials:
        cfg = dataclasses.replace(cfg, trials=args.trials)
    out = Path(args.out or cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)

    result = run_error_sweep_detailed(cfg, threads=args.threads)
    write_rows(result.rows, out)
    write_meta(result, cfg, out.with_name(out.name + ".meta.json"))

    print(f"{'n':>7} {'m':>6} {'estimator':>10} {'median':>12} {'bound':>12} {'ratio':>8}")
    for r in result.rows:
        print(f"{r.n:>7} {r.m:>6} {r.estimator:>10} {r.median_abs_err:>12.4g} {r.theory_bound:>12.4g} {r.ratio:>8.3f}")
    for est in cfg.estimators:
        rows = [r for r in result.rows if r.estimator == est]
        ratios = [r.ratio for r in rows if not r.failed]
        spread = max(ratios) / min(ratios) if ratios else float("nan")
        try:
            slope, r2 = fit_scaling_exponent(rows, "n", allow_covarying=True)
            fit = f"slope {slope:+.3f} (r2 {r2:.3f})"
        except DegenerateFitError:
            fit = "slope n/a (< 3 cells)"
        print(f"{est}: ratio spread {spread:.3f}, median error vs n {fit}")
    if result.failures:
        print(f"{len(result.failures)} failed trials; see {out}.meta.json")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()

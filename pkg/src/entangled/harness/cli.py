"""``entangled`` command line.

Exit codes: 0 success, 1 numerical failure (quadrature, step budget, failed
verification), 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from pathlib import Path

from ..core import default_initialization
from ..errors import DomainError, EntangledError, NumericalError, ScheduleOverflowError
from ..estimators import estimate_iterative_truncation
from ..instances import OutOfRangeWarning, case1_params, case2_params
from ..lowerbound import run_sign_error_experiment
from ..parallel import resolve_threads
from .config import load_config
from .io import lowerbound_csv, read_samples
from .sweep import run_error_sweep_detailed, write_meta, write_rows

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="master seed (non-negative)")
    p.add_argument("--threads", type=int, default=1, help="worker processes, 0 = one per CPU")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="entangled", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", parents=[common], help="run the iterative-truncation estimator")
    est.add_argument("input", nargs="?", default="-", help="single-column CSV of samples, '-' for stdin")
    est.add_argument("--mu0", type=float)
    est.add_argument("--B", type=float)
    est.add_argument("--m", type=int, required=True, help="assumed number of signals")
    est.add_argument("--auto-init", action="store_true", help="mu0 = sample mean, B = 2 * diameter")
    est.add_argument("--inner-scale", type=float, default=1.0)
    est.add_argument("--step-budget", type=int, default=None)
    est.add_argument("--trace", action="store_true", help="include every iterate in the output")

    sw = sub.add_parser("sweep", parents=[common], help="Monte Carlo error sweep from a JSON config")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", default=None, help="override the config's output path")

    lb = sub.add_parser("lowerbound", parents=[common], help="wrong-sign rate on a two-point prior")
    lb.add_argument("--case", type=int, choices=(1, 2), required=True)
    lb.add_argument("--n", type=int, required=True)
    lb.add_argument("--m", type=int, default=None, help="default: ceil(2 ln n) for case 1")
    lb.add_argument("--trials", type=int, default=2000)
    lb.add_argument("--c-sigma", type=float, default=10.0)
    lb.add_argument("--c-l", type=float, default=0.1)
    lb.add_argument("--out", default=None, help="CSV path (default stdout)")

    vt = sub.add_parser("verify-toolbox", parents=[common], help="closed forms against quadrature")
    vt.add_argument("--draws", type=int, default=200)
    vt.add_argument("--out", default=None, help="CSV path (default stdout)")
    return parser


def _seed(args, default: int = 0) -> int | None:
    seed = default if args.seed is None else args.seed
    if seed is not None and seed < 0:
        raise _UsageError(f"--seed must be non-negative, got {seed}")
    return seed


def _cmd_estimate(args) -> int:
    if args.input == "-":
        samples = read_samples(sys.stdin, _seed(args))
    else:
        with open(args.input, newline="") as fh:
            samples = read_samples(fh, _seed(args))
    if args.auto_init:
        if args.mu0 is not None or args.B is not None:
            raise _UsageError("--auto-init excludes --mu0/--B")
        mu0, B = default_initialization(samples)
    else:
        if args.mu0 is None or args.B is None:
            raise _UsageError("give --mu0 and --B, or --auto-init")
        mu0, B = args.mu0, args.B
    res = estimate_iterative_truncation(
        samples, mu0, B, args.m, args.inner_scale, trace=args.trace, step_budget=args.step_budget
    )
    out = {
        "estimate": res.estimate,
        "mu0": res.mu0,
        "B": res.schedule.B,
        "K": res.schedule.K,
        "T": res.schedule.T,
        "n": samples.n,
        "m": args.m,
    }
    if res.trace is not None:
        out["trace"] = [
            {"delta": s.delta, "iterates": s.iterates.tolist()} for s in res.trace.stages
        ]
    print(json.dumps(out))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = _seed(args)
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        config = type(config).from_dict({**config.to_dict(), **overrides})
    result = run_error_sweep_detailed(config, args.threads)
    write_rows(result.rows, config.out)
    write_meta(result, config, str(config.out) + ".meta.json")
    failed = sorted({(f.n, f.m, f.estimator) for f in result.failures})
    for n, m, name in failed:
        print(f"cell n={n} m={m} {name} failed", file=sys.stderr)
    print(f"wrote {len(result.rows)} rows to {config.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_lowerbound(args) -> int:
    m = args.m
    if m is None:
        if args.case != 1:
            raise _UsageError("--m is required for case 2")
        m = math.ceil(2.0 * math.log(args.n))
    build = case1_params if args.case == 1 else case2_params
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", OutOfRangeWarning)
        prior = build(args.n, m, C_sigma=args.c_sigma, c_L=args.c_l)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    seed = _seed(args)
    res = run_sign_error_experiment(prior, args.n, args.trials, seed, args.threads)
    record = {
        "n": args.n, "m": m, "case": args.case, "C_sigma": args.c_sigma, "c_L": args.c_l,
        "wrong_rate": res.wrong_sign_rate, "bayes_error": res.bayes_expected_error,
        "L": prior.L, "ci": res.ci_halfwidth, "seed": seed,
    }
    text = lowerbound_csv(record)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(
        f"case {args.case}, n={args.n}, m={m}: wrong sign in {res.wrong_sign_rate:.4f} "
        f"+/- {res.ci_halfwidth:.4f} of {args.trials} trials; Bayes error "
        f"{res.bayes_expected_error:.4g} = {res.bayes_expected_error / prior.L:.3f} L "
        f"(L = {prior.L:.4g}, alpha = {prior.alpha:.3g})",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    from ..analysis.verify import verify_toolbox

    if args.draws < 1:
        raise _UsageError("--draws must be >= 1")
    rows = verify_toolbox(args.draws, _seed(args))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("kind", "params_hash", "closed_form", "quadrature", "abs_diff", "pass"))
        for r in rows:
            w.writerow(
                (
                    r.kind, r.params_hash, format(r.closed_form, ".17g"),
                    format(r.quadrature, ".17g"), format(r.abs_diff, ".17g"),
                    "true" if r.passed else "false",
                )
            )
    finally:
        if fh is not sys.stdout:
            fh.close()
    bad = sum(not r.passed for r in rows)
    print(f"{len(rows) - bad}/{len(rows)} checks passed", file=sys.stderr)
    return EXIT_NUMERICAL if bad else EXIT_OK


COMMANDS = {
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
    "lowerbound": _cmd_lowerbound,
    "verify-toolbox": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        resolve_threads(args.threads)
    except ValueError as exc:
        print(f"entangled: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"entangled {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ScheduleOverflowError) as exc:
        print(f"entangled {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        parser.print_usage(sys.stderr)
        print(f"entangled {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EntangledError) as exc:
        print(f"entangled {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

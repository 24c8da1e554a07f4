"""Monte Carlo error sweeps over (n, m) cells.

Work is split into (cell, estimator, trial) units, each seeded by
``derive_seed(master, n, m, estimator_index, trial)`` where the index is the
estimator's position in :data:`ESTIMATORS`. A unit's result depends only on
its own seed, and rows are reduced and sorted after all units return, so the
CSV is the same for any worker count.
"""

from __future__ import annotations

import csv
import functools
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core import default_initialization
from ..errors import EntangledError
from ..estimators import estimate_iterative_truncation, estimate_median, estimate_sample_mean
from ..instances import generate_subset_of_signals
from ..parallel import parallel_map
from ..seeding import derive_seed
from .config import ESTIMATORS, SweepConfig

CSV_HEADER = (
    "n", "m", "estimator", "trials", "mean_abs_err", "median_abs_err",
    "q90_abs_err", "theory_bound", "seed", "wall_time_ms",
)


def theory_bound(n: int, m: int) -> float:
    return math.sqrt(n * math.log(n)) / m


@dataclass(frozen=True)
class SweepRow:
    n: int
    m: int
    estimator: str
    trials: int
    mean_abs_err: float
    median_abs_err: float
    q90_abs_err: float
    theory_bound: float
    seed: int
    wall_time_ms: float | None = None

    @property
    def failed(self) -> bool:
        return math.isnan(self.median_abs_err)

    @property
    def ratio(self) -> float:
        return self.median_abs_err / self.theory_bound


@dataclass(frozen=True)
class CellFailure:
    n: int
    m: int
    estimator: str
    trial: int
    error: str


@dataclass(frozen=True)
class SweepResult:
    rows: list[SweepRow]
    failures: list[CellFailure]
    # trials whose default init broke B >= 2 |mu0 - mu_star|
    init_violations: dict[tuple[int, int], int]


@dataclass(frozen=True)
class _Unit:
    n: int
    m: int
    est_idx: int
    trial: int


def _run_unit(unit: _Unit, config: SweepConfig):
    """``(abs_error, init_violation, error_message, seconds)`` of one trial."""
    seed = derive_seed(config.seed, unit.n, unit.m, unit.est_idx, unit.trial)
    start = time.perf_counter()
    instance, samples = generate_subset_of_signals(
        unit.n, unit.m, config.mu_star, config.sigma_signal, config.noise, seed
    )
    name = ESTIMATORS[unit.est_idx]
    violation = False
    try:
        if name == "iter_trunc":
            mu0, B = default_initialization(samples)
            violation = B < 2.0 * abs(mu0 - instance.mu_star)
            est = estimate_iterative_truncation(
                samples, mu0, B, unit.m, config.inner_scale, step_budget=config.step_budget
            ).estimate
        elif name == "median":
            est = estimate_median(samples)
        else:
            est = estimate_sample_mean(samples)
    except EntangledError as exc:
        return math.nan, violation, f"{type(exc).__name__}: {exc}", time.perf_counter() - start
    return abs(est - instance.mu_star), violation, "", time.perf_counter() - start


def run_error_sweep_detailed(config: SweepConfig, threads: int = 1) -> SweepResult:
    units = [
        _Unit(n, m, ESTIMATORS.index(name), trial)
        for n, m in config.cells()
        for name in config.estimators
        for trial in range(config.trials)
    ]
    outputs = parallel_map(functools.partial(_run_unit, config=config), units, threads)

    grouped: dict[tuple[int, int, str], list] = {}
    for unit, out in zip(units, outputs):
        grouped.setdefault((unit.n, unit.m, ESTIMATORS[unit.est_idx]), []).append((unit.trial, out))

    rows, failures, violations = [], [], {}
    for (n, m, name), results in sorted(grouped.items()):
        errs = np.array([out[0] for _, out in results])
        seconds = sum(out[3] for _, out in results)
        if name == "iter_trunc":
            violations[(n, m)] = sum(bool(out[1]) for _, out in results)
        bad = [(trial, out[2]) for trial, out in results if out[2]]
        failures.extend(CellFailure(n, m, name, t, msg) for t, msg in bad)
        if bad:
            stats = (math.nan, math.nan, math.nan)
        else:
            stats = (
                float(np.mean(errs)),
                float(np.median(errs)),
                float(np.quantile(errs, 0.9)),
            )
        rows.append(
            SweepRow(
                n=n, m=m, estimator=name, trials=config.trials,
                mean_abs_err=stats[0], median_abs_err=stats[1], q90_abs_err=stats[2],
                theory_bound=theory_bound(n, m), seed=config.seed,
                wall_time_ms=1e3 * seconds if config.record_timing else None,
            )
        )
    return SweepResult(rows, failures, violations)


def run_error_sweep(config: SweepConfig, threads: int = 1) -> list[SweepRow]:
    """One row per (n, m, estimator), sorted. Cells where any trial raised
    carry NaN statistics; see :func:`run_error_sweep_detailed` for why."""
    return run_error_sweep_detailed(config, threads).rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def write_rows(rows: list[SweepRow], path: str | Path) -> None:
    rows = sorted(rows, key=lambda r: (r.n, r.m, r.estimator))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])


def read_rows(path: str | Path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        out = []
        for rec in reader:
            out.append(
                SweepRow(
                    n=int(rec["n"]), m=int(rec["m"]), estimator=rec["estimator"],
                    trials=int(rec["trials"]),
                    mean_abs_err=float(rec["mean_abs_err"]),
                    median_abs_err=float(rec["median_abs_err"]),
                    q90_abs_err=float(rec["q90_abs_err"]),
                    theory_bound=float(rec["theory_bound"]),
                    seed=int(rec["seed"]),
                    wall_time_ms=float(rec["wall_time_ms"]) if rec["wall_time_ms"] else None,
                )
            )
        return out


def write_meta(result: SweepResult, config: SweepConfig, path: str | Path) -> None:
    meta = {
        "config": config.to_dict(),
        "failed_cells": sorted(
            {(f.n, f.m, f.estimator) for f in result.failures}
        ),
        "failures": [vars(f) for f in result.failures[:50]],
        "init_violations": [
            {"n": n, "m": m, "count": c} for (n, m), c in sorted(result.init_violations.items())
        ],
    }
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

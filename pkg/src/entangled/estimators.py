"""Iterative-truncation mean estimator and two plain baselines."""

from __future__ import annotations

import math
import os
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .core import (
    IterationTrace,
    SampleSet,
    StageTrace,
    TruncationSchedule,
    build_schedule,
)
from .errors import DomainError, EmptyInputError, ScheduleOverflowError

STEP_BUDGET_ENV = "ENTANGLED_STEP_BUDGET"
DEFAULT_STEP_BUDGET = 10**9


def resolve_step_budget(step_budget: int | None = None) -> int:
    """Explicit budget, else ``$ENTANGLED_STEP_BUDGET``, else 10**9."""
    if step_budget is not None:
        return int(step_budget)
    raw = os.environ.get(STEP_BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_STEP_BUDGET
    try:
        budget = int(float(raw))
    except (ValueError, OverflowError):
        raise DomainError(f"${STEP_BUDGET_ENV}={raw!r} is not a number") from None
    if budget < 1:
        raise DomainError(f"${STEP_BUDGET_ENV} must be >= 1, got {budget}")
    return budget


def _values(samples) -> np.ndarray:
    values = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if values.size == 0:
        raise EmptyInputError("estimator called on an empty sample")
    return values


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    schedule: TruncationSchedule
    mu0: float
    trace: IterationTrace | None = None


def iterate_once(samples, mu: float, delta: float) -> float:
    """Mean of the samples clamped to ``[mu - delta, mu + delta]``."""
    values = _values(samples)
    if not (math.isfinite(delta) and delta > 0):
        raise DomainError(f"delta must be positive and finite, got {delta}")
    if not math.isfinite(mu):
        raise DomainError(f"mu must be finite, got {mu}")
    return float(np.mean(np.clip(values, mu - delta, mu + delta)))


class SortedTruncatedMean:
    """``mu -> mean(clip(x, mu - delta, mu + delta))`` in O(log n) per call.

    Values are sorted once. Two bisections find how many samples fall below,
    inside and above the window; the inside sum comes from prefix sums
    anchored at the median so that far outliers never enter the subtraction.
    Agrees with :func:`iterate_once` up to summation-order rounding.
    """

    def __init__(self, values):
        xs = np.sort(np.asarray(values, dtype=np.float64))
        n = xs.size
        if n == 0:
            raise EmptyInputError("estimator called on an empty sample")
        h = n // 2
        left = np.cumsum(xs[:h][::-1])[::-1]  # left[k] = sum(xs[k:h])
        right = np.concatenate(([0.0], np.cumsum(xs[h:])))  # right[k-h] = sum(xs[h:k])
        self._xs = xs.tolist()
        self._prefix = np.concatenate((-left, right)).tolist()
        self.n = n

    def __call__(self, mu: float, delta: float) -> float:
        lo = mu - delta
        hi = mu + delta
        i = bisect_left(self._xs, lo)
        j = bisect_right(self._xs, hi)
        total = lo * i + (self._prefix[j] - self._prefix[i]) + hi * (self.n - j)
        return total / self.n


def estimate_iterative_truncation(
    samples,
    mu0: float,
    B: float,
    m: int,
    inner_scale: float = 1.0,
    trace: bool = False,
    step_budget: int | None = None,
) -> EstimateResult:
    """Run ``K + 1`` stages of ``T + 1`` truncated-averaging steps.

    Stage ``k`` uses half-width ``B / 2**k``; the last iterate of a stage seeds
    the next. Raises :class:`ScheduleOverflowError` when ``n (T+1) (K+1)``
    exceeds the step budget instead of silently shortening the run.
    """
    values = _values(samples)
    if not math.isfinite(mu0):
        raise DomainError(f"mu0 must be finite, got {mu0}")
    n = values.size
    schedule = build_schedule(B, n, m, inner_scale)
    budget = resolve_step_budget(step_budget)
    work = schedule.truncation_count(n)
    if work > budget:
        raise ScheduleOverflowError(
            f"{work:.3e} truncations (n={n}, T={schedule.T}, K={schedule.K}) exceed the "
            f"budget of {budget:.3e}; lower inner_scale or raise ${STEP_BUDGET_ENV}"
        )

    step = SortedTruncatedMean(values)
    mu = float(mu0)
    stages = []
    for delta in schedule.deltas:
        if trace:
            iterates = [mu]
            for _ in range(schedule.T + 1):
                mu = step(mu, delta)
                iterates.append(mu)
            stages.append(StageTrace(delta=delta, iterates=np.array(iterates)))
        else:
            for _ in range(schedule.T + 1):
                mu = step(mu, delta)
    return EstimateResult(
        estimate=mu,
        schedule=schedule,
        mu0=float(mu0),
        trace=IterationTrace(tuple(stages)) if trace else None,
    )


def estimate_sample_mean(samples) -> float:
    return float(np.mean(_values(samples)))


def estimate_median(samples) -> float:
    """Lower median: the sorted element at 0-based index ``(n - 1) // 2``."""
    values = _values(samples)
    k = (values.size - 1) // 2
    return float(np.partition(values, k)[k])

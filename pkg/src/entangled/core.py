"""Domain types, the truncation map and the schedule arithmetic of the
iterative-truncation estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, EmptyInputError, InvalidIntervalError


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GaussianInstance:
    """Hidden truth of one problem: common mean and per-sample std devs."""

    mu_star: float
    sigmas: np.ndarray

    def __post_init__(self):
        sigmas = _frozen_array(self.sigmas, "sigmas")
        if sigmas.size < 1:
            raise DomainError("an instance needs at least one sigma")
        if np.any(sigmas <= 0):
            raise DomainError("every sigma must be positive")
        if not math.isfinite(self.mu_star):
            raise DomainError("mu_star must be finite")
        object.__setattr__(self, "sigmas", sigmas)
        object.__setattr__(self, "mu_star", float(self.mu_star))

    @property
    def n(self) -> int:
        return int(self.sigmas.size)

    def order_statistic(self, k: int) -> float:
        """The k-th smallest sigma (1-based)."""
        if not 1 <= k <= self.n:
            raise DomainError(f"order statistic index {k} outside [1, {self.n}]")
        return float(np.partition(self.sigmas, k - 1)[k - 1])

    def satisfies_subset_of_signals(self, m: int) -> bool:
        return self.order_statistic(m) <= 1.0


@dataclass(frozen=True, eq=False)
class SampleSet:
    """One draw per distribution; ``seed`` is 0 for externally supplied data."""

    values: np.ndarray
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, "sample values"))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class TruncationSchedule:
    """Control parameters of the estimator: half-width ladder ``B / 2**k`` for
    ``k = 0..K`` and ``T + 1`` averaging steps per stage."""

    B: float
    K: int
    T: int
    inner_scale: float = 1.0
    n: int | None = None
    m: int | None = None

    @property
    def deltas(self) -> tuple[float, ...]:
        return tuple(self.B / 2.0**k for k in range(self.K + 1))

    @property
    def stages(self) -> int:
        return self.K + 1

    def truncation_count(self, n: int | None = None) -> int:
        """Elementary truncations the full run performs: ``n (T+1) (K+1)``."""
        n = self.n if n is None else n
        if n is None:
            raise DomainError("sample size unknown for this schedule")
        return n * (self.T + 1) * (self.K + 1)


@dataclass(frozen=True)
class StageTrace:
    delta: float
    iterates: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class IterationTrace:
    """Per-stage iterates ``mu_t`` for ``t = 0..T+1``."""

    stages: tuple[StageTrace, ...]

    @property
    def final(self) -> float:
        return float(self.stages[-1].iterates[-1])

    def errors(self, mu_star: float) -> list[np.ndarray]:
        """``e_t = |mu_t - mu_star|`` for every stage."""
        return [np.abs(s.iterates - mu_star) for s in self.stages]


def truncate(x: float, lo: float, hi: float) -> float:
    """Clamp ``x`` into ``[lo, hi]``."""
    if not (math.isfinite(x) and math.isfinite(lo) and math.isfinite(hi)):
        raise InvalidIntervalError(f"non-finite input to truncate: {(x, lo, hi)}")
    if lo > hi:
        raise InvalidIntervalError(f"empty interval [{lo}, {hi}]")
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


def floor_log2(B: float) -> int:
    # frexp is exact; math.log2 can round up just below a power of two
    mantissa, exponent = math.frexp(B)
    return exponent - 1


def build_schedule(B: float, n: int, m: int, inner_scale: float = 1.0) -> TruncationSchedule:
    if not (math.isfinite(B) and B > 0):
        raise DomainError(f"B must be positive and finite, got {B}")
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    if not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, n={n}], got {m}")
    if not (math.isfinite(inner_scale) and inner_scale > 0):
        raise DomainError(f"inner_scale must be positive, got {inner_scale}")
    K = max(0, floor_log2(B))
    T = max(1, math.ceil(inner_scale * 64.0 * n * math.log(n) / m))
    return TruncationSchedule(B=float(B), K=K, T=T, inner_scale=float(inner_scale), n=n, m=m)


def default_initialization(samples: SampleSet | Sequence[float]) -> tuple[float, float]:
    """Sample mean and twice the sample diameter (1.0 when all values coincide)."""
    values = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if values.size == 0:
        raise EmptyInputError("cannot initialise from an empty sample")
    mu0 = float(np.mean(values))
    diameter = float(np.max(values) - np.min(values))
    B = 2.0 * diameter if diameter > 0 else 1.0
    return mu0, B

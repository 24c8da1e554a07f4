"""Bias of one truncated sample and the variance summaries that control the
per-step contraction of the estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, EmptyInputError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def normal_cdf(x: float) -> float:
    """Standard normal CDF through ``erfc`` (accurate in both tails)."""
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / _SQRT2)


def normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


@dataclass(frozen=True)
class BiasQuery:
    """Sample std ``sigma``, truncation half-width ``delta`` and current
    offset ``delta_e = |mu - mu_star|``."""

    sigma: float
    delta: float
    delta_e: float

    def __post_init__(self):
        for name in ("sigma", "delta", "delta_e"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not (self.sigma > 0 and self.delta > 0 and self.delta_e >= 0):
            raise DomainError("need sigma > 0, delta > 0, delta_e >= 0")

    @property
    def a(self) -> float:
        return (self.delta_e - self.delta) / self.sigma

    @property
    def b(self) -> float:
        return (self.delta_e + self.delta) / self.sigma


def truncated_mean_expectation(q: BiasQuery) -> float:
    """``E[clip(x, mu - delta, mu + delta)] - mu_star`` for ``x ~ N(mu_star, sigma^2)``
    and ``mu = mu_star + delta_e``.

    The clamp contributes ``(delta_e - delta) Phi(a)`` below the window,
    ``sigma (g(a) - g(b))`` inside and ``(delta_e + delta)(1 - Phi(b))`` above.
    """
    a, b = q.a, q.b
    return (
        (q.delta_e - q.delta) * normal_cdf(a)
        + q.sigma * (normal_pdf(a) - normal_pdf(b))
        + (q.delta_e + q.delta) * normal_sf(b)
    )


def bias_bound(q: BiasQuery) -> float:
    """``delta_e (1 - delta/max(delta_e, delta) * delta/max(sigma, delta) / 5)``."""
    shrink = (q.delta / max(q.delta_e, q.delta)) * (q.delta / max(q.sigma, q.delta)) / 5.0
    return q.delta_e * (1.0 - shrink)


def bias_bound_check(q: BiasQuery, slack: float = 1e-12) -> tuple[float, float, bool]:
    lhs = abs(truncated_mean_expectation(q))
    rhs = bias_bound(q)
    return lhs, rhs, lhs <= rhs + slack


def _sigmas(sigmas) -> np.ndarray:
    arr = np.asarray(sigmas, dtype=float).reshape(-1)
    if arr.size == 0:
        raise EmptyInputError("need at least one sigma")
    if np.any(arr <= 0):
        raise DomainError("sigmas must be positive")
    return arr


def harmonic_mean_clamped(sigmas, delta: float) -> float:
    """Harmonic mean of ``max(sigma_i, delta)``."""
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    arr = _sigmas(sigmas)
    return arr.size / float(np.sum(1.0 / np.maximum(arr, delta)))


def m_of_delta(sigmas, delta: float) -> int:
    """Number of sigmas at most ``delta``."""
    return int(np.count_nonzero(_sigmas(sigmas) <= delta))


def bias_grid(points_per_axis: int = 10) -> list[BiasQuery]:
    """``points_per_axis**3`` queries: sigma log-spaced on [0.1, 100], delta
    log-spaced on [0.1, 10], and delta_e = 0 plus log-spaced values on
    [0.01 delta, 10 delta]."""
    k = points_per_axis
    sigmas = np.logspace(-1, 2, k)
    deltas = np.logspace(-1, 1, k)
    fracs = np.concatenate(([0.0], np.logspace(-2, 1, k - 1)))
    return [
        BiasQuery(float(s), float(d), float(f * d))
        for s in sigmas
        for d in deltas
        for f in fracs
    ]

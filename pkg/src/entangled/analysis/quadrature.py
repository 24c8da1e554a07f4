"""Adaptive quadrature used as the verification oracle.

Backed by QUADPACK's globally adaptive Gauss-Kronrod routine. A result is
only returned when the embedded error estimate meets the requested tolerance;
otherwise :class:`QuadratureError` is raised.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

from ..errors import DomainError, QuadratureError


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    tail_cut: float = 12.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.tail_cut < 8:
            raise DomainError("tail_cut below 8 leaves more than 1e-15 of Gaussian mass")


DEFAULT_SPEC = QuadratureSpec()


def quadrature(
    integrand: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    points: Iterable[float] = (),
) -> tuple[float, float]:
    """Integrate ``integrand`` over the finite interval ``[lo, hi]``.

    ``points`` marks kinks or narrow peaks inside the interval; QUADPACK
    splits there first. Returns ``(value, error_estimate)``.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise DomainError(f"bad integration interval [{lo}, {hi}]")
    if lo == hi:
        return 0.0, 0.0
    # breakpoints a hair apart produce degenerate subintervals; merge them
    gap = 1e-9 * (hi - lo)
    inner = []
    for p in sorted(float(p) for p in points):
        if lo + gap < p < hi - gap and (not inner or p - inner[-1] > gap):
            inner.append(p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err, info, *rest = integrate.quad(
            integrand,
            lo,
            hi,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            points=inner or None,
            full_output=1,
        )
    # a trailing message is only present when QUADPACK reports ier != 0
    message = rest[0] if rest else ""
    if not math.isfinite(value):
        raise QuadratureError(f"non-finite quadrature value on [{lo}, {hi}]")
    tol = max(spec.abs_tol, spec.rel_tol * abs(value))
    if message or err > tol:
        raise QuadratureError(
            f"quadrature did not converge on [{lo}, {hi}]: err={err:.3e}, tol={tol:.3e}. {message}"
        )
    return float(value), float(err)


def gaussian_window(centers: Iterable[float], scale: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """Interval covering ``tail_cut`` scales beyond every center."""
    centers = list(centers)
    return min(centers) - spec.tail_cut * scale, max(centers) + spec.tail_cut * scale


def normal_pdf(x, mean: float = 0.0, sd: float = 1.0):
    z = (np.asarray(x, dtype=float) - mean) / sd
    return np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * sd)

"""Log-log least squares of median error against n or m."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import DegenerateFitError, DomainError
from .sweep import SweepRow


def fit_scaling_exponent(
    rows: Sequence[SweepRow], vary: str, allow_covarying: bool = False
) -> tuple[float, float]:
    """Slope and r^2 of ``log median_abs_err`` on ``log x`` with ``x`` the
    ``vary`` column.

    The other of ``n``/``m`` must be constant across rows unless
    ``allow_covarying`` is set (e.g. a threshold sweep where ``m`` tracks ``n``).
    Failed rows (NaN median) are dropped before fitting.
    """
    if vary not in ("n", "m"):
        raise DomainError(f"vary must be 'n' or 'm', got {vary!r}")
    rows = [r for r in rows if not math.isnan(r.median_abs_err)]
    if len({r.estimator for r in rows}) > 1:
        raise DomainError("rows mix several estimators; fit one at a time")
    other = "m" if vary == "n" else "n"
    if not allow_covarying and len({getattr(r, other) for r in rows}) > 1:
        raise DomainError(f"rows vary {other!r} as well as {vary!r}")
    x = np.array([getattr(r, vary) for r in rows], dtype=float)
    y = np.array([r.median_abs_err for r in rows], dtype=float)
    if np.unique(x).size < 3:
        raise DegenerateFitError(f"need >= 3 distinct {vary} values, got {np.unique(x).size}")
    if np.any(y <= 0):
        raise DomainError("median errors must be positive to take logs")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), r2

"""Closed form against quadrature, for every toolbox kind and the truncated
mean.

Parameters are drawn from two domains. ``general`` covers scales in
[0.1, 10] and offsets up to a few scales. ``regime`` mirrors where the bound-type
kinds are used with the two-point prior (narrow kernel ``b <= 1`` from
``sigma_pq <= sigma_p = 1``, wide weight ``c >= 10`` from
``sigma_q >= C_sigma sigma_p``, offset at most ``0.2 c``); the stated
bounds are checked there. Outside that domain some of them do not hold.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from ..seeding import make_rng
from .bias import BiasQuery, truncated_mean_expectation
from .quadrature import QuadratureSpec, quadrature
from .toolbox import BOUND_KINDS, KINDS, integrand_for, toolbox_integral

REL_TOL = 1e-8
ABS_TOL = 1e-12
BOUND_SLACK = 1e-12


def _log_uniform(rng, lo, hi):
    return float(10 ** rng.uniform(math.log10(lo), math.log10(hi)))


def sample_params(kind: str, rng: np.random.Generator, domain: str = "general") -> dict:
    if domain == "regime":
        b, c = _log_uniform(rng, 0.1, 1.0), _log_uniform(rng, 10.0, 1000.0)
        off = float(rng.uniform(1e-3, 0.2)) * c
        if kind == "erf_linear_bound":
            return {"eps": _log_uniform(rng, 1e-6, 10.0)}
        key = "L" if kind == "abs_difference" else "M"
        return {"b": b, "c": c, key: off}
    b, c = _log_uniform(rng, 0.1, 10.0), _log_uniform(rng, 0.1, 10.0)
    off = float(rng.uniform(0.0, 3.0))
    if kind == "double_exp_product":
        return {"a": _log_uniform(rng, 0.1, 10.0), "b": b, "c": c, "L": off}
    if kind == "x_weighted":
        return {"b": b, "c": c, "L": off, "opposite": bool(rng.random() < 0.5)}
    if kind in ("x2_weighted_antiderivative", "x2_shifted_antiderivative"):
        lo, hi = sorted(rng.uniform(-5.0, 5.0, size=2).tolist())
        out = {"b": b, "c": c, "lo": lo, "hi": hi}
        if kind == "x2_shifted_antiderivative":
            out["M"] = off
        return out
    if kind == "erf_linear_bound":
        return {"eps": _log_uniform(rng, 1e-6, 10.0)}
    if kind == "absolute_moment":
        return {"c": c, "p": int(rng.integers(0, 7))}
    if kind in ("x_abs_diff_sq", "x2_abs_diff"):
        return {"b": b, "c": c, "M": off}
    return {"b": b, "c": c, "L": off}


def params_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class ToolboxCheck:
    kind: str
    params: dict
    closed_form: float
    quadrature: float
    bound: float | None = None

    @property
    def params_hash(self) -> str:
        return params_hash(self.params)

    @property
    def abs_diff(self) -> float:
        return abs(self.closed_form - self.quadrature)

    @property
    def matches(self) -> bool:
        return self.abs_diff <= max(REL_TOL * abs(self.quadrature), ABS_TOL)

    @property
    def bound_holds(self) -> bool:
        return self.bound is None or self.closed_form <= self.bound + BOUND_SLACK

    @property
    def passed(self) -> bool:
        return self.matches and self.bound_holds


def check_kind(kind: str, params: dict, spec: QuadratureSpec | None = None, with_bound: bool = False):
    spec = spec or QuadratureSpec()
    value = toolbox_integral(kind, **params)
    bound = None
    if kind in BOUND_KINDS:
        value, bound = value
    ig = integrand_for(kind, params, spec)
    quad, _ = quadrature(ig.f, ig.lo, ig.hi, spec, ig.points)
    return ToolboxCheck(kind, params, float(value), quad, bound if with_bound else None)


def truncated_mean_by_quadrature(q: BiasQuery, spec: QuadratureSpec | None = None) -> float:
    """``E[clip(x, lo, hi)]`` for ``x ~ N(0, sigma^2)``, window ``[delta_e -/+ delta]``.

    Integrates ``clip(x) - lo``, which vanishes below the window, and adds
    ``lo`` back, so the integrand stays small even when the window is far out.
    """
    spec = spec or QuadratureSpec()
    lo, hi = q.delta_e - q.delta, q.delta_e + q.delta
    s = q.sigma
    norm = 1.0 / (math.sqrt(2 * math.pi) * s)

    def f(x):
        return (min(max(x, lo), hi) - lo) * norm * math.exp(-0.5 * (x / s) ** 2)

    value, _ = quadrature(f, -spec.tail_cut * s, spec.tail_cut * s, spec, (lo, hi, 0.0))
    return lo + value


def verify_toolbox(draws: int = 200, seed: int = 0, spec: QuadratureSpec | None = None) -> list[ToolboxCheck]:
    """Every kind on ``draws`` general draws; bound kinds again on ``draws``
    regime draws with the bound checked; plus ``draws // 4`` truncated-mean
    cross-checks."""
    rng = make_rng(seed)
    rows = []
    for kind in KINDS:
        for _ in range(draws):
            rows.append(check_kind(kind, sample_params(kind, rng), spec))
        if kind in BOUND_KINDS:
            for _ in range(draws):
                rows.append(check_kind(kind, sample_params(kind, rng, "regime"), spec, with_bound=True))
    tight = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12)
    for _ in range(max(1, draws // 4)):
        delta = _log_uniform(rng, 0.1, 10.0)
        q = BiasQuery(_log_uniform(rng, 0.1, 100.0), delta, float(rng.uniform(0, 10 * delta)))
        rows.append(
            ToolboxCheck(
                "truncated_mean",
                {"sigma": q.sigma, "delta": q.delta, "delta_e": q.delta_e},
                truncated_mean_expectation(q),
                truncated_mean_by_quadrature(q, tight),
            )
        )
    return rows

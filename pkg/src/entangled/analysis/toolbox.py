"""Closed-form Gaussian integrals used by the lower-bound moment calculations.

Each kind pairs a closed form with the integral that defines it, so the two
can be compared by quadrature (see :mod:`entangled.analysis.verify`). In the
formulas ``phi(x; m, c)`` is the normal density with mean ``m`` and std ``c``.

=========================== ==============================================================
kind                        defining integral
=========================== ==============================================================
same_mean_product           int exp(-(x-L)^2/2b^2) phi(x; L, c)
opposite_mean_product       int exp(-(x+L)^2/2b^2) phi(x; L, c)
double_exp_product          int exp(-(x-L)^2/2a^2 - (x+L)^2/2b^2) phi(x; L, c)
x_weighted                  int x exp(-(x -/+ L)^2/2b^2) phi(x; L, c)   (``opposite`` picks +)
x2_weighted_antiderivative  int_lo^hi x^2 exp(-x^2/2b^2) phi(x; 0, c)
x2_shifted_antiderivative   int_lo^hi x^2 exp(-(x+M)^2/2b^2) phi(x; 0, c)
erf_linear_bound            erf(eps) = 2/sqrt(pi) int_0^eps exp(-t^2), bound 2 eps/sqrt(pi)
absolute_moment             int |x|^p phi(x; 0, c)
abs_difference              int |exp(-(x-L)^2/2b^2) - exp(-(x+L)^2/2b^2)| phi(x; L, c)
x_abs_diff_sq               int |x| (exp(-x^2/2b^2) - exp(-(x+M)^2/2b^2))^2 phi(x; 0, c)
x2_abs_diff                 int x^2 |exp(-x^2/2b^2) - exp(-(x+M)^2/2b^2)| phi(x; 0, c)
=========================== ==============================================================

Bound-type kinds return ``(exact, bound)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError
from .quadrature import DEFAULT_SPEC, QuadratureSpec, gaussian_window

SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT2 = math.sqrt(2.0)


def erf_diff(hi: float, lo: float) -> float:
    """``erf(hi) - erf(lo)`` without cancellation when both sit in one tail."""
    if lo >= 0:
        return math.erfc(lo) - math.erfc(hi)
    if hi <= 0:
        return math.erfc(-hi) - math.erfc(-lo)
    return math.erf(hi) - math.erf(lo)


def _abs_mean(mean: float, sd: float) -> float:
    """``E|X|`` for ``X ~ N(mean, sd^2)``."""
    return sd * math.sqrt(2.0 / math.pi) * math.exp(-0.5 * (mean / sd) ** 2) + mean * math.erf(
        mean / (SQRT2 * sd)
    )


def _require_positive(**scales):
    for name, v in scales.items():
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be positive and finite, got {v}")


def same_mean_product(b, c, L=0.0):
    _require_positive(b=b, c=c)
    return b / math.sqrt(b * b + c * c)


def opposite_mean_product(b, c, L):
    _require_positive(b=b, c=c)
    s = b * b + c * c
    return b / math.sqrt(s) * math.exp(-2.0 * L * L / s)


def double_exp_product(a, b, c, L):
    _require_positive(a=a, b=b, c=c)
    den = a * a * b * b + a * a * c * c + b * b * c * c
    return a * b / math.sqrt(den) * math.exp(-2.0 * L * L * (a * a + c * c) / den)


def x_weighted(b, c, L, opposite=False):
    _require_positive(b=b, c=c)
    s = b * b + c * c
    if not opposite:
        return b / math.sqrt(s) * L
    return b / math.sqrt(s) * math.exp(-2.0 * L * L / s) * (b * b - c * c) / s * L


def x2_weighted_antiderivative(b, c, lo, hi):
    _require_positive(b=b, c=c)
    s = b * b + c * c
    k = math.sqrt(s) / (SQRT2 * b * c)

    def tail(x):
        return b * b * c * x / (SQRT_2PI * s) * math.exp(-x * x / (2 * b * b) - x * x / (2 * c * c))

    return b**3 * c * c / (2.0 * s**1.5) * erf_diff(k * hi, k * lo) - (tail(hi) - tail(lo))


def x2_shifted_antiderivative(b, c, M, lo, hi):
    _require_positive(b=b, c=c)
    s = b * b + c * c
    scale = SQRT2 * b * c * math.sqrt(s)

    def arg(x):
        return (b * b * x + c * c * M + c * c * x) / scale

    def tail(x):
        return (
            b * b * c / (SQRT_2PI * s * s)
            * math.exp(-((M + x) ** 2) / (2 * b * b) - x * x / (2 * c * c))
            * (b * b * x + c * c * (x - M))
        )

    lead = b * c * c * (b**4 + b * b * c * c + c * c * M * M) / (2.0 * s**2.5)
    return lead * math.exp(-M * M / (2.0 * s)) * erf_diff(arg(hi), arg(lo)) - (tail(hi) - tail(lo))


def erf_linear_bound(eps):
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    return math.erf(eps), 2.0 / SQRT_PI * eps


def double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def absolute_moment(c, p):
    _require_positive(c=c)
    p = int(p)
    if p < 0:
        raise DomainError(f"moment order must be >= 0, got {p}")
    factor = math.sqrt(2.0 / math.pi) if p % 2 else 1.0
    return c**p * double_factorial(p - 1) * factor


def abs_difference(b, c, L):
    _require_positive(b=b, c=c)
    s = b * b + c * c
    exact = b / math.sqrt(s) * math.erf(math.sqrt(s / (2 * b * b * c * c)) * L) + b * math.exp(
        -2 * L * L / s
    ) / math.sqrt(s) * math.erf((c * c - b * b) / (b * c * math.sqrt(2 * s)) * L)
    bound = 4.0 / SQRT_PI * c * c / s * L / c
    return exact, bound


def x_abs_diff_sq(b, c, M):
    """Expanding the square gives three Gaussian-weighted ``E|X|`` terms."""
    _require_positive(b=b, c=c)
    d = b * b + 2 * c * c
    sd = b * c / math.sqrt(d)
    amp = b / math.sqrt(d)
    t_same = amp * _abs_mean(0.0, sd)
    t_cross = amp * math.exp(-M * M / (4 * d) - M * M / (4 * b * b)) * _abs_mean(-M * c * c / d, sd)
    t_shift = amp * math.exp(-M * M / d) * _abs_mean(-2 * M * c * c / d, sd)
    exact = t_same - 2.0 * t_cross + t_shift
    bound = math.sqrt(32.0 / math.pi) * c**3 * M / d**2
    return exact, bound


def x2_abs_diff(b, c, M):
    _require_positive(b=b, c=c)
    s = b * b + c * c
    return (
        b**3 * c * c / s**1.5 * math.erf(math.sqrt(s) / (math.sqrt(8.0) * b * c) * M)
        + b * c * c * (b**4 + b * b * c * c + c * c * M * M) / s**2.5
        * math.erf((c * c - b * b) * M / (2 * b * c * math.sqrt(2 * s)))
        * math.exp(-M * M / (2 * s))
        + 2.0 / SQRT_2PI * b * b * c**3 * M / s**2 * math.exp(-M * M / (8 * b * b) - M * M / (8 * c * c))
    )


# ---------------------------------------------------------------------------
# defining integrands


def _g(x, center, width):
    return np.exp(-((x - center) ** 2) / (2.0 * width * width))


def _phi(x, mean, sd):
    return _g(x, mean, sd) / (SQRT_2PI * sd)


def _product_center(centers_widths):
    prec = sum(1.0 / (w * w) for _, w in centers_widths)
    return sum(m / (w * w) for m, w in centers_widths) / prec


@dataclass(frozen=True)
class Integrand:
    f: Callable[[float], float]
    lo: float
    hi: float
    points: tuple[float, ...] = ()


_PEAK_OFFSETS = (-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 12.0)


def _peak_points(features):
    """Breakpoints bracketing each ``(center, width)`` feature so a narrow
    peak inside a wide window cannot fall between Kronrod nodes."""
    return [m + k * w for m, w in features for k in _PEAK_OFFSETS]


def _weighted(f, centers, c, features, spec):
    lo, hi = gaussian_window(centers, c, spec)
    # a feature never resolves finer than the weight itself
    features = [(m, min(w, c)) for m, w in features]
    return Integrand(f, lo, hi, tuple(_peak_points(features)))


def integrand_for(kind: str, params: dict, spec: QuadratureSpec = DEFAULT_SPEC) -> Integrand:
    """The integral that ``kind``'s closed form evaluates, on a finite window."""
    p = params
    if kind == "same_mean_product":
        b, c, L = p["b"], p["c"], p["L"]
        return _weighted(lambda x: _g(x, L, b) * _phi(x, L, c), [L], c, [(L, b)], spec)
    if kind == "opposite_mean_product":
        b, c, L = p["b"], p["c"], p["L"]
        mid = _product_center([(-L, b), (L, c)])
        return _weighted(lambda x: _g(x, -L, b) * _phi(x, L, c), [-L, L], c, [(mid, b), (-L, b), (L, c)], spec)
    if kind == "double_exp_product":
        a, b, c, L = p["a"], p["b"], p["c"], p["L"]
        mid = _product_center([(L, a), (-L, b), (L, c)])
        return _weighted(
            lambda x: _g(x, L, a) * _g(x, -L, b) * _phi(x, L, c), [-L, L], c, [(mid, min(a, b)), (-L, b), (L, a)], spec
        )
    if kind == "x_weighted":
        b, c, L = p["b"], p["c"], p["L"]
        shift = -L if p.get("opposite") else L
        mid = _product_center([(shift, b), (L, c)])
        return _weighted(
            lambda x: x * _g(x, shift, b) * _phi(x, L, c), [-L, L], c, [(mid, b), (0.0, c), (shift, b)], spec
        )
    if kind == "x2_weighted_antiderivative":
        b, c = p["b"], p["c"]
        return Integrand(lambda x: x * x * _g(x, 0.0, b) * _phi(x, 0.0, c), p["lo"], p["hi"], (0.0,))
    if kind == "x2_shifted_antiderivative":
        b, c, M = p["b"], p["c"], p["M"]
        mid = _product_center([(-M, b), (0.0, c)])
        return Integrand(
            lambda x: x * x * _g(x, -M, b) * _phi(x, 0.0, c), p["lo"], p["hi"], (0.0, mid, -M)
        )
    if kind == "erf_linear_bound":
        return Integrand(lambda t: 2.0 / SQRT_PI * math.exp(-t * t), 0.0, p["eps"])
    if kind == "absolute_moment":
        c, k = p["c"], int(p["p"])
        return _weighted(lambda x: abs(x) ** k * _phi(x, 0.0, c), [0.0], c, [(0.0, c)], spec)
    if kind == "abs_difference":
        b, c, L = p["b"], p["c"], p["L"]
        mids = [_product_center([(L, b), (L, c)]), _product_center([(-L, b), (L, c)])]
        return _weighted(
            lambda x: abs(_g(x, L, b) - _g(x, -L, b)) * _phi(x, L, c),
            [-L, L], c, [(0.0, b), (-L, b), (L, b), *((m, b) for m in mids)], spec,
        )
    if kind == "x_abs_diff_sq":
        b, c, M = p["b"], p["c"], p["M"]
        mids = [_product_center([(-M, b), (0.0, c)]), _product_center([(-M / 2, b), (0.0, c)])]
        return _weighted(
            lambda x: abs(x) * (_g(x, 0.0, b) - _g(x, -M, b)) ** 2 * _phi(x, 0.0, c),
            [-M, 0.0], c, [(0.0, b), (-M, b), (-M / 2, b), *((m, b) for m in mids)], spec,
        )
    if kind == "x2_abs_diff":
        b, c, M = p["b"], p["c"], p["M"]
        mids = [_product_center([(-M, b), (0.0, c)])]
        return _weighted(
            lambda x: x * x * abs(_g(x, 0.0, b) - _g(x, -M, b)) * _phi(x, 0.0, c),
            [-M, 0.0], c, [(0.0, b), (-M, b), (-M / 2, b), *((m, b) for m in mids)], spec,
        )
    raise DomainError(f"unknown toolbox kind {kind!r}")


CLOSED_FORMS: dict[str, Callable] = {
    "same_mean_product": same_mean_product,
    "opposite_mean_product": opposite_mean_product,
    "double_exp_product": double_exp_product,
    "x_weighted": x_weighted,
    "x2_weighted_antiderivative": x2_weighted_antiderivative,
    "x2_shifted_antiderivative": x2_shifted_antiderivative,
    "erf_linear_bound": erf_linear_bound,
    "absolute_moment": absolute_moment,
    "abs_difference": abs_difference,
    "x_abs_diff_sq": x_abs_diff_sq,
    "x2_abs_diff": x2_abs_diff,
}

BOUND_KINDS = frozenset({"erf_linear_bound", "abs_difference", "x_abs_diff_sq"})
KINDS = tuple(CLOSED_FORMS)


def toolbox_integral(kind: str, **params):
    """Closed form of ``kind``; bound-type kinds return ``(exact, bound)``."""
    try:
        fn = CLOSED_FORMS[kind]
    except KeyError:
        raise DomainError(f"unknown toolbox kind {kind!r}") from None
    return fn(**params)

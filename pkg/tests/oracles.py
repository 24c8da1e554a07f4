"""Reference computations that avoid the package's own formulas.

Each oracle takes a different route to the same number: high-precision
mixture densities instead of the N_i/D_i factorisation, plain quadrature of
the defining integral instead of a closed form, and so on.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy import integrate


def mixture_log_ratio(x, p, sigma_p, sigma_q, L, dps=50):
    """``ln prod f_{+L}(x_i) - ln prod f_{-L}(x_i)`` with
    ``f_mu = p N(mu, sigma_p^2) + (1-p) N(mu, sigma_q^2)``, in ``dps`` digits."""
    with mpmath.workdps(dps):
        p, sp, sq, L = (mpmath.mpf(v) for v in (p, sigma_p, sigma_q, L))
        q = 1 - p

        def f(xi, mu):
            return p * mpmath.npdf(xi, mu, sp) + q * mpmath.npdf(xi, mu, sq)

        total = mpmath.mpf(0)
        for xi in x:
            xi = mpmath.mpf(float(xi))
            total += mpmath.log(f(xi, L)) - mpmath.log(f(xi, -L))
        return float(total)


def schedule_T(n, m, inner_scale=1.0, dps=50):
    with mpmath.workdps(dps):
        return int(mpmath.ceil(mpmath.mpf(inner_scale) * 64 * n * mpmath.log(n) / m))


def clipped_mean(x, mu, delta):
    """Mean of the samples clamped to ``[mu - delta, mu + delta]``, one at a time."""
    lo, hi = mu - delta, mu + delta
    return math.fsum(min(max(float(v), lo), hi) for v in x) / len(x)


def truncated_bias(sigma, delta, delta_e, dps=30):
    """``E[clip(x, delta_e - delta, delta_e + delta)]`` for ``x ~ N(0, sigma^2)``
    by mpmath quadrature, split at the clamp corners."""
    with mpmath.workdps(dps):
        s, d, e = (mpmath.mpf(v) for v in (sigma, delta, delta_e))
        lo, hi = e - d, e + d

        def f(x):
            return min(max(x, lo), hi) * mpmath.npdf(x, 0, s)

        # breakpoints at the clamp corners and across the Gaussian bulk
        pts = sorted({lo, hi, *(k * s for k in (-8, -2, 0, 2, 8))})
        return float(mpmath.quad(f, [-mpmath.inf, *pts, mpmath.inf]))


def group_moment_quadrature(prior, sigma, j, which):
    """``E[N^j]``, ``E[D^j]`` or ``E[N^j D^j]`` for ``x ~ N(L, sigma^2)`` by
    adaptive quadrature of the factors built directly from their definition."""
    a, L, v = prior.alpha, prior.L, prior.sigma_pq**2

    def N(x):
        return a * math.exp(-((x - L) ** 2) / (2 * v))

    def D(x):
        return a * math.exp(-((x + L) ** 2) / (2 * v))

    g = {"N": lambda x: N(x) ** j, "D": lambda x: D(x) ** j, "ND": lambda x: (N(x) * D(x)) ** j}[which]

    def integrand(x):
        return g(x) * math.exp(-((x - L) ** 2) / (2 * sigma * sigma)) / (math.sqrt(2 * math.pi) * sigma)

    # the factors live within a few sigma_pq of +-L; outside, the weight is negligible
    width = 14.0 * math.sqrt(v)
    pieces = sorted({-L - width, -L, 0.0, L, L + width, -L + width, L - width})
    total = 0.0
    for lo, hi in zip(pieces, pieces[1:]):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-13, limit=500)
        total += val
    return total


def quantile(values, q):
    """Linear-interpolation quantile, written out."""
    xs = sorted(values)
    pos = q * (len(xs) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (xs[hi] - xs[lo]) * (pos - lo)


def ols_slope(x, y):
    x, y = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    xm, ym = x.mean(), y.mean()
    return float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))

"""Likelihood-ratio machinery for the two-point prior.

Under the prior, the log-likelihood ratio of ``+L`` against ``-L`` splits per
sample as ``ln(1 + N_i) - ln(1 + D_i) + beta x_i`` with

    N_i = alpha exp(-(x_i - L)^2 / (2 sigma_pq^2))
    D_i = alpha exp(-(x_i + L)^2 / (2 sigma_pq^2)).

Everything is evaluated from ``ln N_i`` and ``ln D_i``: in the small-m regime
``sigma_q`` reaches the hundreds and plain exponentials lose all precision.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .core import SampleSet
from .errors import DomainError, NumericalError
from .instances import TwoPointPrior, prior_groups, sample_prior_instance
from .parallel import parallel_map
from .seeding import derive_seed, make_rng


_LOG_MAX = math.log(np.finfo(float).max)


class Group(str, enum.Enum):
    P = "p"
    Q = "q"


def softplus(u):
    """``ln(1 + exp(u))`` without overflow for large ``u`` or underflow loss
    for very negative ``u``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.maximum(u, 0.0) + np.log1p(np.exp(-np.abs(u)))


def _log_factors(x, prior: TwoPointPrior):
    if prior.log_alpha == math.inf:
        raise NumericalError("alpha is infinite (p = 1): N_i and D_i are undefined")
    s2 = 2.0 * prior.sigma_pq**2
    log_n = prior.log_alpha - (x - prior.L) ** 2 / s2
    log_d = prior.log_alpha - (x + prior.L) ** 2 / s2
    return log_n, log_d


def log_ratio_terms(x, prior: TwoPointPrior) -> np.ndarray:
    """Per-sample contributions ``ln(1+N) - ln(1+D) + beta x``."""
    x = np.asarray(x, dtype=float)
    log_n, log_d = _log_factors(x, prior)
    terms = softplus(log_n) - softplus(log_d) + prior.beta * x
    if not np.all(np.isfinite(terms)):
        raise NumericalError("non-finite log-likelihood term; check sigma_pq and L")
    return terms


def _group_mask(assignments, n: int) -> np.ndarray:
    arr = np.asarray(assignments)
    if arr.shape != (n,):
        raise DomainError(f"need {n} group assignments, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr
    labels = np.array([Group(a).value for a in arr.tolist()])
    return labels == Group.P.value


@dataclass(frozen=True)
class LikelihoodReport:
    log_ratio: float
    x_p_part: float
    x_q_part: float
    per_group_counts: tuple[int, int]


def log_likelihood_ratio(samples, sigma_assignments, prior: TwoPointPrior) -> LikelihoodReport:
    """``ln(L+ / L-)`` with its split over the ``sigma_p`` and ``sigma_q`` groups.

    ``sigma_assignments`` holds ``"p"``/``"q"`` labels (or a boolean mask,
    True for group p). The assignments only route terms into ``x_p_part``
    and ``x_q_part``; the total does not depend on them.
    """
    x = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    in_p = _group_mask(sigma_assignments, x.size)
    terms = log_ratio_terms(x, prior)
    x_p = float(np.sum(terms[in_p]))
    x_q = float(np.sum(terms[~in_p]))
    n_p = int(np.count_nonzero(in_p))
    return LikelihoodReport(x_p + x_q, x_p, x_q, (n_p, x.size - n_p))


def exact_group_log_moments(
    prior: TwoPointPrior, group: Group | str, j: int, true_mean_sign: int = 1
) -> tuple[float, float, float]:
    """Natural logs of ``(E[N^j], E[D^j], E[N^j D^j])`` for a sample from
    ``group`` whose mean is ``true_mean_sign * L``."""
    if j < 1:
        raise DomainError(f"moment order must be >= 1, got {j}")
    if true_mean_sign not in (1, -1):
        raise DomainError("true_mean_sign must be +1 or -1")
    s = prior.sigma_p if Group(group) is Group.P else prior.sigma_q
    la = prior.log_alpha
    if la == math.inf:
        raise NumericalError("alpha is infinite (p = 1)")
    v = prior.sigma_pq**2
    L2 = prior.L**2
    log_en = j * la + 0.5 * math.log(v) - 0.5 * math.log(v + j * s * s)
    log_ed = log_en - 2.0 * j * L2 / (v + j * s * s)
    log_end = (
        2 * j * la
        + 0.5 * math.log(v)
        - 0.5 * math.log(v + 2 * j * s * s)
        - 2.0 * j * L2 * (v + j * s * s) / (v * v + 2 * j * v * s * s)
    )
    if true_mean_sign == -1:
        # reflecting x -> -x swaps the roles of N and D
        log_en, log_ed = log_ed, log_en
    return log_en, log_ed, log_end


def exact_group_moments(
    prior: TwoPointPrior, group: Group | str, j: int, true_mean_sign: int = 1
) -> tuple[float, float, float]:
    """Closed forms of ``(E[N^j], E[D^j], E[N^j D^j])``; see
    :func:`exact_group_log_moments` when they may exceed double range."""
    logs = exact_group_log_moments(prior, group, j, true_mean_sign)
    if max(logs) > _LOG_MAX:
        raise NumericalError(
            f"moment of order {j} overflows double precision (log = {max(logs):.4g}); "
            "use exact_group_log_moments"
        )
    return tuple(math.exp(v) for v in logs)


def taylor_Y(x, prior: TwoPointPrior, t: int):
    """``beta x + sum_{j=1}^{2t-1} (-1)^{j+1} (N^j - D^j) / j``."""
    if t < 1:
        raise DomainError(f"Taylor order t must be >= 1, got {t}")
    xa = np.asarray(x, dtype=float)
    log_n, log_d = _log_factors(xa, prior)
    v = np.zeros_like(xa)
    for j in range(1, 2 * t):
        v += (-1) ** (j + 1) * (np.exp(j * log_n) - np.exp(j * log_d)) / j
    y = prior.beta * xa + v
    return float(y) if np.ndim(x) == 0 else y


def taylor_remainder(x, prior: TwoPointPrior, t: int):
    """``max(N^{2t}, D^{2t}) / (2t)``, the per-sample bound on ``|exact - Y|``."""
    xa = np.asarray(x, dtype=float)
    log_n, log_d = _log_factors(xa, prior)
    r = np.exp(2 * t * np.maximum(log_n, log_d)) / (2 * t)
    return float(r) if np.ndim(x) == 0 else r


@dataclass(frozen=True)
class SignErrorResult:
    wrong_sign_rate: float
    bayes_expected_error: float
    ci_halfwidth: float
    trials: int
    mean_p_count: float

    def __iter__(self):
        yield from (self.wrong_sign_rate, self.bayes_expected_error, self.ci_halfwidth)


def _score_trial(trial: int, prior: TwoPointPrior, n: int, seed: int) -> tuple[int, int]:
    """Twice the wrong-sign score of one trial (ties score 1) and |S_p|."""
    sign, instance, samples = sample_prior_instance(prior, n, derive_seed(seed, trial))
    lr = float(np.sum(log_ratio_terms(samples.values, prior)))
    if lr == 0.0:
        halves = 1
    else:
        halves = 2 if (lr > 0) != (sign > 0) else 0
    return halves, int(np.count_nonzero(prior_groups(instance, prior)))


def run_sign_error_experiment(
    prior: TwoPointPrior, n: int, trials: int, seed: int, threads: int = 1
) -> SignErrorResult:
    """How often the exact likelihood ratio prefers the wrong mean.

    The Bayes rule under the prior outputs ``sign(log_ratio) * L`` and errs by
    ``2L`` exactly when the sign is wrong, so ``2 L * rate`` is its expected
    error and a floor for every estimator on this prior.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    score = functools.partial(_score_trial, prior=prior, n=n, seed=seed)
    results = parallel_map(score, range(trials), threads)
    halves = sum(h for h, _ in results)
    rate = halves / (2.0 * trials)
    return SignErrorResult(
        wrong_sign_rate=rate,
        bayes_expected_error=2.0 * prior.L * rate,
        ci_halfwidth=2.0 * math.sqrt(rate * (1.0 - rate) / trials),
        trials=trials,
        mean_p_count=sum(c for _, c in results) / trials,
    )


@dataclass(frozen=True)
class MomentReport:
    t: int
    group: Group
    exact_moments: dict[int, tuple[float, float, float]]
    empirical_moments: dict[int, tuple[float, float, float]]
    empirical_Y_mean: float
    empirical_Y_second: float
    empirical_Y_central: float
    predicted_Y_mean_bound: float
    predicted_Y_second_order: float
    mean_remainder: float
    mc_draws: int


def predicted_orders(prior: TwoPointPrior, group: Group | str) -> tuple[float, float]:
    """Order-of-magnitude predictions for ``E[Y]`` and ``E[Y^2]`` (no constants)."""
    a, sp, sq, L = prior.alpha, prior.sigma_p, prior.sigma_q, prior.L
    clip = min(1.0, L**2 / sp**2)
    if Group(group) is Group.Q:
        return L**2 / sq**2, a * a * prior.gamma * clip + L**2 / sq**2
    second = L**2 * sp**2 / sq**4 + L**4 / sq**4 + a * a * clip + a * L**2 / sq**2
    return a * clip, second


def group_draws(
    prior: TwoPointPrior, group: Group | str, draws: int, seed: int, stratified: bool = True
) -> np.ndarray:
    """Draws of ``x ~ N(+L, sigma_group^2)``.

    With ``stratified`` the unit interval is cut into ``draws`` equal strata
    with one uniform per stratum, mapped through the normal quantile. Each
    draw is still marginally exact; the variance drops sharply for integrands
    supported on a narrow window of a wide Gaussian (group q).
    """
    rng = make_rng(seed)
    s = prior.sigma_p if Group(group) is Group.P else prior.sigma_q
    if stratified:
        u = (np.arange(draws) + rng.random(draws)) / draws
        z = ndtri(u)
    else:
        z = rng.standard_normal(draws)
    return prior.L + s * z


def moment_diagnostics(
    prior: TwoPointPrior,
    group: Group | str,
    t: int,
    mc_draws: int = 10**6,
    seed: int = 0,
    stratified: bool = True,
) -> MomentReport:
    """Closed-form moments next to Monte Carlo statistics of ``Y``.

    Predicted orders are reported only; they hold only up to constants.
    """
    if mc_draws < 10**4:
        raise DomainError(f"mc_draws must be >= 1e4, got {mc_draws}")
    group = Group(group)
    x = group_draws(prior, group, mc_draws, seed, stratified)
    log_n, log_d = _log_factors(x, prior)
    exact, empirical = {}, {}
    for j in range(1, 2 * t + 1):
        exact[j] = exact_group_moments(prior, group, j)
        nj, dj = np.exp(j * log_n), np.exp(j * log_d)
        empirical[j] = (float(nj.mean()), float(dj.mean()), float((nj * dj).mean()))
    y = taylor_Y(x, prior, t)
    mean_bound, second_order = predicted_orders(prior, group)
    return MomentReport(
        t=t,
        group=group,
        exact_moments=exact,
        empirical_moments=empirical,
        empirical_Y_mean=float(y.mean()),
        empirical_Y_second=float(np.mean(y * y)),
        empirical_Y_central=float(np.var(y)),
        predicted_Y_mean_bound=mean_bound,
        predicted_Y_second_order=second_order,
        mean_remainder=float(np.mean(taylor_remainder(x, prior, t))),
        mc_draws=mc_draws,
    )

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entangled.errors import DomainError, NumericalError
from entangled.instances import TwoPointPrior, case2_params
from entangled.lowerbound import (
    Group,
    exact_group_log_moments,
    exact_group_moments,
    log_likelihood_ratio,
    log_ratio_terms,
    moment_diagnostics,
    run_sign_error_experiment,
    softplus,
    taylor_remainder,
    taylor_Y,
)
from oracles import group_moment_quadrature, mixture_log_ratio

priors = st.builds(
    lambda p, sq, L: TwoPointPrior(p, 1.0, sq, L),
    st.floats(min_value=0.02, max_value=0.95),
    st.floats(min_value=1.2, max_value=500.0),
    st.floats(min_value=0.0, max_value=3.0),
)


def _nd(x, prior):
    v = prior.sigma_pq**2
    N = prior.alpha * math.exp(-((x - prior.L) ** 2) / (2 * v))
    D = prior.alpha * math.exp(-((x + prior.L) ** 2) / (2 * v))
    return N, D


def test_softplus_is_stable():
    u = np.array([-800.0, -40.0, 0.0, 40.0, 800.0])
    out = softplus(u)
    assert np.all(np.isfinite(out))
    assert out[0] == pytest.approx(math.exp(-800.0), rel=1e-12)
    assert out[2] == pytest.approx(math.log(2.0), rel=1e-15)
    assert out[4] == 800.0


def test_zero_L_gives_zero_ratio():
    prior = TwoPointPrior(0.3, 1.0, 9.0, 0.0)
    x = np.random.default_rng(0).normal(0, 5, 50)
    rep = log_likelihood_ratio(x, ["q"] * 50, prior)
    assert rep.log_ratio == 0.0


@given(priors)
def test_zero_sample_contributes_nothing(prior):
    assert log_ratio_terms([0.0], prior)[0] == 0.0


@given(priors, st.integers(min_value=0, max_value=2**32))
def test_matches_mixture_density_oracle(prior, seed):
    rng = np.random.default_rng(seed)
    sign = rng.choice([-1, 1])
    x = sign * prior.L + np.where(rng.random(5) < prior.p, 1.0, prior.sigma_q) * rng.standard_normal(5)
    got = log_likelihood_ratio(x, ["p"] * 5, prior).log_ratio
    ref = mixture_log_ratio(x, prior.p, 1.0, prior.sigma_q, prior.L)
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-15)


def test_group_split():
    prior = TwoPointPrior(0.3, 1.0, 9.0, 0.2)
    x = np.random.default_rng(1).normal(0.2, 3, 20)
    labels = ["p" if i % 3 == 0 else "q" for i in range(20)]
    rep = log_likelihood_ratio(x, labels, prior)
    assert rep.log_ratio == rep.x_p_part + rep.x_q_part
    assert rep.per_group_counts == (7, 13)
    mask = np.array([lab == "p" for lab in labels])
    assert log_likelihood_ratio(x, mask, prior) == rep
    with pytest.raises(DomainError):
        log_likelihood_ratio(x, labels[:-1], prior)
    with pytest.raises(ValueError):
        log_likelihood_ratio(x, ["r"] * 20, prior)


@given(priors, st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=1, max_size=20))
def test_antisymmetry(prior, xs):
    x = np.array(xs)
    a = log_likelihood_ratio(x, ["q"] * x.size, prior).log_ratio
    b = log_likelihood_ratio(-x, ["q"] * x.size, prior).log_ratio
    assert b == -a


def test_extreme_case1_scale_stays_finite():
    # sigma_q in the millions and alpha tiny: naive exp would underflow
    prior = TwoPointPrior(1e-6, 1.0, 1e6, 10.0)
    x = np.array([-1e7, -10.0, 0.5, 10.0, 1e7])
    terms = log_ratio_terms(x, prior)
    assert np.all(np.isfinite(terms))
    ref = mixture_log_ratio(x, prior.p, 1.0, prior.sigma_q, prior.L)
    assert terms.sum() == pytest.approx(ref, rel=1e-9)


def test_p_one_is_rejected():
    with pytest.raises(NumericalError):
        log_ratio_terms([1.0], TwoPointPrior(1.0, 1.0, 2.0, 0.1))


def test_moments_equal_at_zero_L():
    prior = TwoPointPrior(0.1, 1.0, 20.0, 0.0)
    en, ed, _ = exact_group_moments(prior, "q", 1)
    assert en == ed


@pytest.mark.parametrize("group", ["p", "q"])
@pytest.mark.parametrize("j", [1, 2, 3])
def test_moments_match_quadrature(group, j):
    prior = case2_params(10**4, 100)
    sigma = prior.sigma_p if group == "p" else prior.sigma_q
    exact = exact_group_moments(prior, group, j)
    for value, which in zip(exact, ("N", "D", "ND")):
        assert value == pytest.approx(group_moment_quadrature(prior, sigma, j, which), rel=1e-8)


@given(priors, st.integers(min_value=1, max_value=6), st.sampled_from(["p", "q"]))
def test_moment_ordering(prior, j, group):
    en, ed, end = exact_group_moments(prior, group, j)
    assert min(en, ed, end) >= 0
    assert ed <= en * (1 + 1e-12)
    # a mean of -L just swaps the N and D roles
    assert exact_group_moments(prior, group, j, -1)[:2] == (ed, en)


def test_moments_decrease_in_j_when_alpha_small():
    prior = TwoPointPrior(0.02, 1.0, 20.0, 0.1)
    assert prior.alpha < 1
    for group in ("p", "q"):
        seq = [exact_group_moments(prior, group, j) for j in range(1, 7)]
        for a, b in zip(seq, seq[1:]):
            assert all(y < x for x, y in zip(a, b))


def test_moment_args():
    prior = TwoPointPrior(0.1, 1.0, 20.0, 0.1)
    with pytest.raises(DomainError):
        exact_group_moments(prior, "q", 0)
    with pytest.raises(DomainError):
        exact_group_moments(prior, "q", 1, true_mean_sign=0)


def test_extreme_moments_stay_in_log_domain():
    prior = TwoPointPrior(1e-3, 1.0, 1e8, 1e3)
    for j in (1, 10, 100):
        logs = exact_group_log_moments(prior, Group.Q, j)
        assert all(math.isfinite(v) for v in logs)
    assert all(math.isfinite(v) for v in exact_group_moments(prior, Group.Q, 10))
    # alpha ~ 1e5, so alpha^200 is beyond double range
    with pytest.raises(NumericalError):
        exact_group_moments(prior, Group.Q, 100)


def test_tiny_alpha_moments_do_not_flush_in_log_domain():
    prior = TwoPointPrior(1e-9, 1.0, 1.5, 0.1)
    log_en = exact_group_log_moments(prior, "q", 60)[0]
    assert log_en < -1000 and math.isfinite(log_en)


def test_taylor_Y_basics():
    prior = TwoPointPrior(0.05, 1.0, 20.0, 0.3)
    assert taylor_Y(0.0, prior, 3) == 0.0
    x = 0.77
    N, D = _nd(x, prior)
    assert taylor_Y(x, prior, 1) == pytest.approx(N - D + prior.beta * x, rel=1e-14)
    with pytest.raises(DomainError):
        taylor_Y(x, prior, 0)


@given(
    st.floats(min_value=0.001, max_value=0.3),
    st.floats(min_value=1.5, max_value=50),
    st.floats(min_value=0.0, max_value=2.0),
    st.floats(min_value=-20, max_value=20),
    st.integers(min_value=1, max_value=6),
)
def test_taylor_sandwich(p, sq, L, x, t):
    prior = TwoPointPrior(p, 1.0, sq, L)
    N, D = _nd(x, prior)
    if max(N, D) >= 1:
        return
    exact = math.log1p(N) - math.log1p(D) + prior.beta * x
    gap = exact - taylor_Y(x, prior, t)
    tol = 1e-15 * (1 + abs(exact))
    assert -N ** (2 * t) / (2 * t) - tol <= gap <= D ** (2 * t) / (2 * t) + tol
    assert abs(gap) <= taylor_remainder(x, prior, t) + tol


def test_taylor_converges_with_order():
    prior = TwoPointPrior(0.02, 1.0, 20.0, 0.3)
    x = 0.2
    N, D = _nd(x, prior)
    exact = math.log1p(N) - math.log1p(D) + prior.beta * x
    assert abs(taylor_Y(x, prior, 30) - exact) < 1e-15


def test_sign_error_separated_hypotheses():
    prior = TwoPointPrior(0.5, 1.0, 1.01, 50.0)
    res = run_sign_error_experiment(prior, 10, 200, seed=4)
    assert res.wrong_sign_rate == 0.0


def test_sign_error_indistinguishable():
    prior = TwoPointPrior(0.3, 1.0, 4.0, 0.0)
    rate, bayes, ci = run_sign_error_experiment(prior, 20, 300, seed=4)
    assert rate == 0.5 and bayes == 0.0
    assert ci == pytest.approx(2 * math.sqrt(0.25 / 300))


def test_sign_error_scale_invariant():
    prior = TwoPointPrior(0.05, 1.0, 30.0, 0.4)
    base = run_sign_error_experiment(prior, 200, 600, seed=8)
    for lam in (1e-3, 7.0, 1e4):
        other = run_sign_error_experiment(prior.scaled(lam), 200, 600, seed=8)
        assert abs(other.wrong_sign_rate - base.wrong_sign_rate) <= base.ci_halfwidth + 1e-12
        assert other.bayes_expected_error == pytest.approx(2 * 0.4 * lam * other.wrong_sign_rate)


def test_sign_error_independent_of_workers():
    prior = TwoPointPrior(0.05, 1.0, 30.0, 0.4)
    a = run_sign_error_experiment(prior, 100, 40, seed=2, threads=1)
    b = run_sign_error_experiment(prior, 100, 40, seed=2, threads=3)
    assert a == b


def test_sign_error_needs_trials():
    with pytest.raises(DomainError):
        run_sign_error_experiment(TwoPointPrior(0.1, 1.0, 3.0, 0.1), 10, 0, seed=0)


def test_moment_diagnostics_symmetric_at_zero_L():
    prior = TwoPointPrior(0.01, 1.0, 200.0, 0.0)
    rep = moment_diagnostics(prior, "q", 2, mc_draws=10**5, seed=1, stratified=False)
    assert abs(rep.empirical_Y_mean) <= 3 * math.sqrt(rep.empirical_Y_central / rep.mc_draws) + 1e-300


def test_moment_diagnostics_second_moment_order():
    prior = case2_params(10**4, 100)
    rep = moment_diagnostics(prior, "q", 1, mc_draws=10**6, seed=5)
    ratio = rep.empirical_Y_second / rep.predicted_Y_second_order
    assert 1 / 5 <= ratio <= 5
    assert set(rep.exact_moments) == {1, 2}


def test_moment_diagnostics_guard():
    with pytest.raises(DomainError):
        moment_diagnostics(TwoPointPrior(0.1, 1.0, 3.0, 0.1), "p", 1, mc_draws=100)

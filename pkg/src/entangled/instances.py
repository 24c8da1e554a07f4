"""Instance generators: subset-of-signals problems and the two-point prior
used by the lower-bound experiment."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .core import GaussianInstance, SampleSet
from .errors import DomainError
from .seeding import make_rng

DEFAULT_C_SIGMA = 10.0
DEFAULT_C_L = 0.1
DEFAULT_C_Q = 10.0
DEFAULT_C_ALPHA = 0.5
DEFAULT_C_P = 1.0


class OutOfRangeWarning(UserWarning):
    """(n, m) falls outside the range a lower-bound case is designed for."""


class NoiseKind(str, enum.Enum):
    CONSTANT = "constant"
    GEOMETRIC_LADDER = "geometric_ladder"
    PARETO_TAIL = "pareto_tail"
    CUSTOM_LIST = "custom_list"


_NOISE_PARAMS = {
    NoiseKind.CONSTANT: ("level",),
    NoiseKind.GEOMETRIC_LADDER: ("start", "ratio"),
    NoiseKind.PARETO_TAIL: ("shape", "scale"),
    NoiseKind.CUSTOM_LIST: ("values",),
}


@dataclass(frozen=True)
class NoiseConfig:
    """How the ``n - m`` non-signal standard deviations are produced.

    ``constant``: every one equals ``level``.
    ``geometric_ladder``: ``start * ratio**k`` for ``k = 0..n-m-1``.
    ``pareto_tail``: ``scale * (1 + Lomax(shape))``, i.i.d.
    ``custom_list``: exactly the supplied ``values``.
    All produced values must exceed 1.
    """

    kind: NoiseKind
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        kind = NoiseKind(self.kind)
        object.__setattr__(self, "kind", kind)
        missing = [k for k in _NOISE_PARAMS[kind] if k not in self.params]
        if missing:
            raise DomainError(f"noise kind {kind.value!r} needs parameters {missing}")
        p = self.params
        if kind is NoiseKind.CONSTANT and not p["level"] > 1:
            raise DomainError("constant noise level must exceed 1")
        if kind is NoiseKind.GEOMETRIC_LADDER and not (p["start"] > 1 and p["ratio"] >= 1):
            raise DomainError("geometric ladder needs start > 1 and ratio >= 1")
        if kind is NoiseKind.PARETO_TAIL and not (p["shape"] > 0 and p["scale"] > 1):
            raise DomainError("pareto tail needs shape > 0 and scale > 1")
        if kind is NoiseKind.CUSTOM_LIST and not all(v > 1 for v in p["values"]):
            raise DomainError("custom noise values must all exceed 1")

    @classmethod
    def constant(cls, level: float) -> "NoiseConfig":
        return cls(NoiseKind.CONSTANT, {"level": float(level)})

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "NoiseConfig":
        d = dict(d)
        kind = d.pop("kind")
        return cls(NoiseKind(kind), d)

    def to_dict(self) -> dict:
        params = {k: (list(v) if k == "values" else v) for k, v in self.params.items()}
        return {"kind": self.kind.value, **params}

    def draw(self, count: int, rng: np.random.Generator) -> np.ndarray:
        p = self.params
        if self.kind is NoiseKind.CONSTANT:
            out = np.full(count, float(p["level"]))
        elif self.kind is NoiseKind.GEOMETRIC_LADDER:
            out = float(p["start"]) * float(p["ratio"]) ** np.arange(count, dtype=float)
        elif self.kind is NoiseKind.PARETO_TAIL:
            out = float(p["scale"]) * (1.0 + rng.pareto(float(p["shape"]), size=count))
        else:
            out = np.asarray(p["values"], dtype=float)
            if out.size != count:
                raise DomainError(f"custom noise list has {out.size} entries, need n - m = {count}")
        if not np.all(np.isfinite(out)):
            raise DomainError(f"{self.kind.value} noise produced non-finite sigmas for count={count}")
        return out


def generate_subset_of_signals(
    n: int,
    m: int,
    mu_star: float,
    sigma_signal: float,
    noise: NoiseConfig,
    seed: int,
) -> tuple[GaussianInstance, SampleSet]:
    """``m`` signals with std ``sigma_signal`` plus ``n - m`` noisy entries,
    shuffled, and one Gaussian draw for each."""
    if not 1 <= m <= n:
        raise DomainError(f"need 1 <= m <= n, got m={m}, n={n}")
    if not 0 < sigma_signal <= 1:
        raise DomainError(f"sigma_signal must lie in (0, 1], got {sigma_signal}")
    rng = make_rng(seed)
    sigmas = np.concatenate((np.full(m, float(sigma_signal)), noise.draw(n - m, rng)))
    sigmas = sigmas[rng.permutation(n)]
    values = mu_star + sigmas * rng.standard_normal(n)
    return GaussianInstance(mu_star, sigmas), SampleSet(values, seed)


@dataclass(frozen=True)
class TwoPointPrior:
    """Two-point prior: each sigma is ``sigma_p`` w.p. ``p`` else ``sigma_q``,
    and the mean is ``+L`` or ``-L`` with equal probability.

    ``alpha = (p/sigma_p) / (q/sigma_q)`` is the odds weight in the
    per-sample likelihood factors, ``beta = 2L / sigma_q**2`` the linear
    drift, ``gamma = sigma_p / sigma_q``, and ``sigma_pq`` satisfies
    ``1/sigma_pq**2 = 1/sigma_p**2 - 1/sigma_q**2``.
    """

    p: float
    sigma_p: float
    sigma_q: float
    L: float
    C_q: float = DEFAULT_C_Q
    C_sigma: float = DEFAULT_C_SIGMA
    c_L: float = DEFAULT_C_L
    c_alpha: float = DEFAULT_C_ALPHA
    q: float = field(init=False)
    alpha: float = field(init=False)
    beta: float = field(init=False)
    gamma: float = field(init=False)
    sigma_pq: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")
        if not (self.sigma_p > 0 and math.isfinite(self.sigma_q)):
            raise DomainError("sigma_p must be positive and sigma_q finite")
        if not self.sigma_q > self.sigma_p:
            raise DomainError(f"need sigma_q > sigma_p, got {self.sigma_q} <= {self.sigma_p}")
        if not (self.L >= 0 and math.isfinite(self.L)):
            raise DomainError(f"L must be finite and non-negative, got {self.L}")
        for name, value in self.derived().items():
            object.__setattr__(self, name, value)

    def derived(self) -> dict[str, float]:
        """Recompute the derived quantities from the primaries."""
        p, sp, sq, L = self.p, self.sigma_p, self.sigma_q, self.L
        q = 1.0 - p
        alpha = math.inf if q == 0 else (p / sp) / (q / sq)
        inv = 1.0 / sp**2 - 1.0 / sq**2
        return {
            "q": q,
            "alpha": alpha,
            "beta": 2.0 * L / sq**2,
            "gamma": sp / sq,
            "sigma_pq": 1.0 / math.sqrt(inv),
        }

    @property
    def log_alpha(self) -> float:
        if self.p == 0:
            return -math.inf
        if self.q == 0:
            return math.inf
        return math.log(self.p) - math.log(self.sigma_p) - math.log(self.q) + math.log(self.sigma_q)

    def conditions(self) -> dict[str, bool]:
        return {
            "q_dominates": self.q > self.C_q * self.p,
            "sigma_separated": self.sigma_q > self.C_sigma * self.sigma_p,
            "L_small": self.L < self.c_L * self.sigma_q,
            "alpha_small": self.alpha < self.c_alpha,
        }

    @property
    def well_conditioned(self) -> bool:
        return all(self.conditions().values())

    def scaled(self, factor: float) -> "TwoPointPrior":
        """Same prior with every length (sigmas and L) multiplied by ``factor``."""
        return TwoPointPrior(
            self.p,
            self.sigma_p * factor,
            self.sigma_q * factor,
            self.L * factor,
            self.C_q,
            self.C_sigma,
            self.c_L,
            self.c_alpha,
        )


def _prior_from_case(n, m, sigma_q, L, C_sigma, c_L, constants) -> TwoPointPrior:
    p = m / n
    if not sigma_q > 1.0:
        raise DomainError(f"case parameters give sigma_q={sigma_q} <= sigma_p=1")
    return TwoPointPrior(p, 1.0, sigma_q, L, C_sigma=C_sigma, c_L=c_L, **constants)


def case1_params(
    n: int,
    m: int,
    C_sigma: float = DEFAULT_C_SIGMA,
    c_L: float = DEFAULT_C_L,
    c_p: float = DEFAULT_C_P,
    **constants,
) -> TwoPointPrior:
    """Small-m regime: ``sigma_q = C_sigma / (p^2 n)``, ``L = c_L / (p^2 n^{3/2})``."""
    if not 1 <= m < n:
        raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")
    if m < 2 * math.log(n) or m > c_p * n**0.25:
        warnings.warn(
            f"case 1 targets 2 ln n <= m <= c_p n^(1/4) = [{2 * math.log(n):.3g}, "
            f"{c_p * n**0.25:.3g}]; got m={m}",
            OutOfRangeWarning,
            stacklevel=2,
        )
    p = m / n
    sigma_q = C_sigma / (p * p * n)
    L = c_L / (p * p * n**1.5)
    return _prior_from_case(n, m, sigma_q, L, C_sigma, c_L, constants)


def case2_params(
    n: int,
    m: int,
    C_sigma: float = DEFAULT_C_SIGMA,
    c_L: float = DEFAULT_C_L,
    C_p: float = DEFAULT_C_P,
    **constants,
) -> TwoPointPrior:
    """Moderate-m regime: ``sigma_q = C_sigma / p^{2/3}``, ``L = c_L / (p^{2/3} sqrt(n))``."""
    if not 1 <= m < n:
        raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")
    if m < C_p * n**0.25:
        warnings.warn(
            f"case 2 targets m >= C_p n^(1/4) = {C_p * n**0.25:.3g}; got m={m}",
            OutOfRangeWarning,
            stacklevel=2,
        )
    p = m / n
    p23 = p ** (2.0 / 3.0)
    sigma_q = C_sigma / p23
    L = c_L / (p23 * math.sqrt(n))
    return _prior_from_case(n, m, sigma_q, L, C_sigma, c_L, constants)


def sample_prior_instance(
    prior: TwoPointPrior, n: int, seed: int
) -> tuple[int, GaussianInstance, SampleSet]:
    """Draw the mean sign, the sigma of every sample, then the samples."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    rng = make_rng(seed)
    sign = 1 if rng.random() < 0.5 else -1
    in_p = rng.random(n) < prior.p
    sigmas = np.where(in_p, prior.sigma_p, prior.sigma_q)
    mu_star = sign * prior.L
    values = mu_star + sigmas * rng.standard_normal(n)
    return sign, GaussianInstance(mu_star, sigmas), SampleSet(values, seed)


def prior_groups(instance: GaussianInstance, prior: TwoPointPrior) -> np.ndarray:
    """Boolean mask of the samples drawn with ``sigma_p``."""
    return instance.sigmas == prior.sigma_p

"""Sweep configuration, loaded from and saved to JSON."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..errors import DomainError
from ..instances import NoiseConfig

ESTIMATORS = ("iter_trunc", "median", "mean")
M_RULE_KINDS = ("fixed", "proportional", "threshold")


@dataclass(frozen=True)
class MRule:
    """How many signals a cell of size ``n`` gets.

    ``fixed``: ``m = value``. ``proportional``: ``m = ceil(c n)``.
    ``threshold``: ``m = ceil(c sqrt(n ln n))``.
    """

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in M_RULE_KINDS:
            raise DomainError(f"unknown m_rule kind {self.kind!r}; expected one of {M_RULE_KINDS}")
        if not (math.isfinite(self.value) and self.value > 0):
            raise DomainError(f"m_rule parameter must be positive, got {self.value}")
        if self.kind == "fixed" and self.value != int(self.value):
            raise DomainError(f"fixed m must be an integer, got {self.value}")

    def __call__(self, n: int) -> int:
        if self.kind == "fixed":
            return int(self.value)
        if self.kind == "proportional":
            return math.ceil(self.value * n)
        return math.ceil(self.value * math.sqrt(n * math.log(n)))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "MRule":
        kind = d.get("kind")
        key = "value" if kind == "fixed" else "c"
        if key not in d:
            raise DomainError(f"m_rule of kind {kind!r} needs key {key!r}")
        return cls(kind, float(d[key]))

    def to_dict(self) -> dict:
        if self.kind == "fixed":
            return {"kind": "fixed", "value": int(self.value)}
        return {"kind": self.kind, "c": self.value}


@dataclass(frozen=True)
class SweepConfig:
    n_grid: tuple[int, ...]
    m_rule: MRule
    estimators: tuple[str, ...] = ESTIMATORS
    noise: NoiseConfig = field(default_factory=lambda: NoiseConfig.constant(1e6))
    trials: int = 200
    seed: int = 0
    inner_scale: float = 1.0
    out: str = "results.csv"
    mu_star: float = 0.0
    sigma_signal: float = 1.0
    step_budget: int | None = None
    record_timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if not self.n_grid:
            raise DomainError("n_grid is empty")
        if any(n < 2 for n in self.n_grid):
            raise DomainError(f"every n must be >= 2, got {list(self.n_grid)}")
        if len(set(self.n_grid)) != len(self.n_grid):
            raise DomainError("n_grid has duplicates")
        if not self.estimators:
            raise DomainError("no estimators selected")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise DomainError(f"unknown estimators {sorted(unknown)}; expected a subset of {ESTIMATORS}")
        if len(set(self.estimators)) != len(self.estimators):
            raise DomainError("estimators has duplicates")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed}")
        if not (math.isfinite(self.inner_scale) and self.inner_scale > 0):
            raise DomainError(f"inner_scale must be positive, got {self.inner_scale}")
        if not math.isfinite(self.mu_star):
            raise DomainError("mu_star must be finite")
        if self.step_budget is not None and self.step_budget < 1:
            raise DomainError(f"step_budget must be >= 1, got {self.step_budget}")
        for n in self.n_grid:
            m = self.m_rule(n)
            if not 1 <= m <= n:
                raise DomainError(f"m_rule gives m={m} for n={n}; need 1 <= m <= n")

    def cells(self) -> list[tuple[int, int]]:
        return [(n, self.m_rule(n)) for n in sorted(self.n_grid)]

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SweepConfig":
        known = {
            "n_grid", "m_rule", "estimators", "noise", "trials", "seed", "inner_scale", "out",
            "mu_star", "sigma_signal", "step_budget", "record_timing",
        }
        extra = set(d) - known
        if extra:
            raise DomainError(f"unknown config keys {sorted(extra)}")
        for key in ("n_grid", "m_rule"):
            if key not in d:
                raise DomainError(f"config is missing {key!r}")
        kwargs = dict(d)
        kwargs["m_rule"] = MRule.from_dict(d["m_rule"])
        if "noise" in d:
            kwargs["noise"] = NoiseConfig.from_dict(d["noise"])
        if d.get("step_budget") is not None:
            kwargs["step_budget"] = int(d["step_budget"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "n_grid": list(self.n_grid),
            "m_rule": self.m_rule.to_dict(),
            "estimators": list(self.estimators),
            "noise": self.noise.to_dict(),
            "trials": self.trials,
            "seed": self.seed,
            "inner_scale": self.inner_scale,
            "out": self.out,
            "mu_star": self.mu_star,
            "sigma_signal": self.sigma_signal,
            "step_budget": self.step_budget,
            "record_timing": self.record_timing,
        }


def load_config(path: str | Path) -> SweepConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DomainError(f"{path}: config must be a JSON object")
    return SweepConfig.from_dict(raw)

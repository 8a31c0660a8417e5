from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .fitness import DISCOUNT_RULES, HEAD_RULES


class ConfigError(ValueError):
    """Invalid simulation or experiment settings."""


@dataclass(frozen=True)
class SimParams:
    grid_width: int = 32
    grid_height: int = 32
    iterations: int = 100
    sr_enabled: bool = False
    chaining_enabled: bool = True
    p_change: float = 1 / 6
    eta: float = 0.1
    p_create_init: float = 0.5
    fitness_head_rule: str = "prose"
    chain_discount_rule: str = "per_step"
    seed: int = 0

    def __post_init__(self):
        for name in ("grid_width", "grid_height", "iterations", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        for name in ("sr_enabled", "chaining_enabled"):
            if not isinstance(getattr(self, name), bool):
                raise ConfigError(f"{name} must be true or false")
        if self.grid_width < 1 or self.grid_height < 1:
            raise ConfigError("grid dimensions must be positive")
        if self.grid_width * self.grid_height < 2:
            raise ConfigError("the lattice needs at least two cells")
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if not 0.0 <= self.p_change <= 1.0:
            raise ConfigError("p_change must lie in [0, 1]")
        if not 0.0 <= self.p_create_init <= 1.0:
            raise ConfigError("p_create_init must lie in [0, 1]")
        if not self.eta > 0:
            raise ConfigError("eta must be positive")
        if self.fitness_head_rule not in HEAD_RULES:
            raise ConfigError(f"fitness_head_rule must be one of {HEAD_RULES}")
        if self.chain_discount_rule not in DISCOUNT_RULES:
            raise ConfigError(f"chain_discount_rule must be one of {DISCOUNT_RULES}")

    @property
    def n_agents(self) -> int:
        return self.grid_width * self.grid_height

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SimParams":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown simulation parameter(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def replace(self, **changes) -> "SimParams":
        return dataclasses.replace(self, **changes)

    def digest(self) -> str:
        """Canonical JSON form; stable across runs and platforms."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

"""
Network configuration.
Derives the sensing dimensions from patch side, sensing rate and sparsity ratio.
"""
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator


def round_half_up(value: float) -> int:
    """Round to nearest integer, halves away from zero (no banker's rounding)."""
    return int(math.floor(value + 0.5))


class NetworkConfig(BaseModel):
    """Architecture of the sensing and reconstruction modules."""
    model_config = ConfigDict(extra='forbid', frozen=True)

    patch_side: int = Field(32, ge=1, description="Patch side S in pixels")
    sensing_rate: float = Field(0.25, gt=0.0, lt=1.0, description="Measurements per pixel R")
    sparsity_ratio: float = Field(0.05, gt=0.0, le=1.0, description="Nonzeros per column over n (gamma)")
    hidden_layers: int = Field(2, ge=1, description="Nonlinear hidden layers L")
    hidden_units: int = Field(2048, ge=1, description="Units per hidden layer H")

    @property
    def n(self) -> int:
        return self.patch_side ** 2

    @property
    def m(self) -> int:
        return round_half_up(self.n * self.sensing_rate)

    @property
    def k(self) -> int:
        # at least one nonzero per column, however small gamma is
        return max(1, round_half_up(self.n * self.sparsity_ratio))

    @model_validator(mode='after')
    def check_dimensions(self):
        errors = []
        if not 1 <= self.m < self.n:
            errors.append(f"m={self.m} must satisfy 1 <= m < n={self.n}")
        if not 1 <= self.k <= self.n:
            errors.append(f"K={self.k} must satisfy 1 <= K <= n={self.n}")
        if errors:
            raise ValueError("; ".join(errors))
        return self

    def describe(self) -> str:
        return (
            f"S={self.patch_side} n={self.n} R={self.sensing_rate} m={self.m} "
            f"gamma={self.sparsity_ratio} K={self.k} L={self.hidden_layers} H={self.hidden_units}"
        )

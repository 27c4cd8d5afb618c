"""
Configuration and result types for the l1 recovery baseline.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

# label used in reports: the solver is a relaxation, not exact basis pursuit
BP_METHOD_LABEL = "bp-ista"


class BpConfig(BaseModel):
    """
    Solver settings for min 1/2 ||A u - y||^2 + lam ||u||_1.

    lam, when given, is used as is; otherwise lam = lam_ratio * ||A^T y||_inf
    per measurement vector.
    """
    model_config = ConfigDict(extra='forbid', frozen=True)

    lam: Optional[float] = Field(None, gt=0.0)
    lam_ratio: float = Field(0.01, gt=0.0, lt=1.0)
    max_iters: int = Field(500, ge=1)
    tol: float = Field(1e-6, gt=0.0, description="Relative objective change that stops the solver")


@dataclass
class IstaResult:
    """Solution and convergence trace of one ISTA solve."""
    u: np.ndarray
    objective: np.ndarray
    iterations: int
    converged: bool
    lam: float

# asymmetry/schemas/simulation.py
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from asymmetry.core.exceptions import ErrorCode, InputError
from asymmetry.schemas.measures import WeightKind

PSI_SYMMETRY_TOL = 1e-12
GENERATOR_NAME = "numpy.random.Philox(4x64-10) via SeedSequence(seed, spawn_key=(replicate,))"


class CsSpec(BaseModel):
    """
    Conditional symmetry model p_ij = delta * psi_ij (i < j), psi_ij (i >= j).
    """

    delta: float = Field(ge=0.0)
    psi: Tuple[Tuple[float, ...], ...]

    model_config = ConfigDict(frozen=True)

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, value: float) -> float:
        if not np.isfinite(value):
            raise InputError("Delta must be finite", error_code=ErrorCode.INVALID_PARAMETER)
        return value

    @field_validator("psi", mode="before")
    @classmethod
    def validate_psi(cls, value: Any) -> Tuple[Tuple[float, ...], ...]:
        grid = np.asarray(value, dtype=np.float64)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1] or grid.shape[0] < 2:
            raise InputError(f"psi must be a square grid with R >= 2, got shape {grid.shape}",
                             error_code=ErrorCode.INVALID_PARAMETER)
        if not np.all(np.isfinite(grid)) or np.any(grid < 0.0):
            raise InputError("psi must be finite and nonnegative", error_code=ErrorCode.INVALID_PARAMETER)
        if np.max(np.abs(grid - grid.T)) > PSI_SYMMETRY_TOL:
            raise InputError("psi must be symmetric", error_code=ErrorCode.INVALID_PARAMETER)
        off = ~np.eye(grid.shape[0], dtype=bool)
        if not np.any(grid[off] > 0.0):
            raise InputError("psi has no off-diagonal mass", error_code=ErrorCode.INVALID_PARAMETER)
        return tuple(tuple(float(v) for v in row) for row in grid)

    @property
    def dim(self) -> int:
        return len(self.psi)

    def psi_array(self) -> np.ndarray:
        return np.array(self.psi, dtype=np.float64)

    @classmethod
    def uniform(cls, delta: float, dim: int = 3) -> "CsSpec":
        """Constant off-diagonal base, the default of every simulation."""
        if dim < 2:
            raise InputError(f"dim must be at least 2, got {dim}", error_code=ErrorCode.INVALID_PARAMETER)
        psi = np.ones((dim, dim)) - np.eye(dim)
        return cls(delta=delta, psi=psi)


class PowerValue(BaseModel):
    lam: float
    value: float

    model_config = ConfigDict(frozen=True)


class SweepRow(BaseModel):
    """One row of the CS sweep: delta, p^c, sqrt(p^c), phi and one value per lambda."""

    delta: float
    pc: float
    sqrt_pc: float
    phi: float
    power: List[PowerValue] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    def power_value(self, lam: float) -> float:
        for item in self.power:
            if item.lam == lam:
                return item.value
        raise KeyError(lam)


class CoverageResult(BaseModel):
    delta: float
    dim: int
    n: int
    reps: int
    alpha: float
    weight: WeightKind
    seed: int
    generator: str = GENERATOR_NAME
    truth: float
    covered: int
    available: int
    not_available: int
    rate: Optional[float] = None
    mean_width: Optional[float] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_tally(self) -> "CoverageResult":
        if self.available + self.not_available != self.reps:
            raise ValueError("coverage tally does not add up to reps")
        return self

# asymmetry/schemas/measures.py
from enum import Enum
from typing import Any, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from asymmetry.core.exceptions import ErrorCode, InputError
from asymmetry.schemas.table import Convention

WEIGHT_TOL = 1e-12


class WeightKind(str, Enum):
    UNIFORM = "uniform"
    PAIR = "pair"
    CUSTOM = "custom"


class MeasureKind(str, Enum):
    PHI = "phi"
    PHI_POWER = "phi_power"


class SeStatus(str, Enum):
    """How the standard error of a report was obtained."""
    OK = "ok"
    # sigma is exactly 0 (every included pair tied); reported as 0
    DEGENERATE = "degenerate"
    # a derivative diverges at a zero cell; SE and CI are not available
    BOUNDARY = "boundary"


class WeightScheme(BaseModel):
    """Pair weights w_ij(p) aggregating the per-pair arcs into Phi."""

    kind: WeightKind = WeightKind.UNIFORM
    custom: Optional[Tuple[Tuple[float, ...], ...]] = None

    model_config = ConfigDict(frozen=True)

    @field_validator("custom", mode="before")
    @classmethod
    def validate_custom(cls, value: Any) -> Optional[Tuple[Tuple[float, ...], ...]]:
        if value is None:
            return None
        grid = np.asarray(value, dtype=np.float64)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1] or grid.shape[0] < 2:
            raise InputError(
                f"Custom weights must be a square grid, got shape {grid.shape}",
                error_code=ErrorCode.INVALID_PARAMETER,
            )
        off = ~np.eye(grid.shape[0], dtype=bool)
        if not np.all(np.isfinite(grid)) or np.any(grid[off] <= 0.0):
            raise InputError("Custom weights must be positive off the diagonal", error_code=ErrorCode.INVALID_PARAMETER)
        total = float(grid[off].sum())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise InputError(
                f"Custom weights sum to {total!r}; supply them normalized",
                error_code=ErrorCode.INVALID_PARAMETER,
                details={"sum": total},
            )
        return tuple(tuple(float(v) for v in row) for row in grid)

    @model_validator(mode="after")
    def check_kind(self) -> "WeightScheme":
        if (self.kind == WeightKind.CUSTOM) != (self.custom is not None):
            raise InputError(
                "Custom weights are required for, and only for, the custom scheme",
                error_code=ErrorCode.INVALID_PARAMETER,
            )
        return self

    @classmethod
    def uniform(cls) -> "WeightScheme":
        return cls(kind=WeightKind.UNIFORM)

    @classmethod
    def pair(cls) -> "WeightScheme":
        return cls(kind=WeightKind.PAIR)


class WeightMap(BaseModel):
    """Realized weights; zero on the diagonal and on skipped pairs."""

    kind: WeightKind
    weights: Tuple[Tuple[float, ...], ...]
    skipped_pairs: int = 0

    model_config = ConfigDict(frozen=True)

    def as_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=np.float64)


class AsymmetryValue(BaseModel):
    value: float = Field(ge=0.0, le=1.0)
    measure: MeasureKind = MeasureKind.PHI
    lam: Optional[float] = None
    weight: Optional[WeightKind] = None
    convention: Convention = Convention.OFF_DIAGONAL
    skipped_pairs: int = 0

    model_config = ConfigDict(frozen=True)


class MeasureReport(BaseModel):
    """Point estimate, delta-method SE and clipped confidence interval."""

    measure: MeasureKind = MeasureKind.PHI
    lam: Optional[float] = None
    weight: Optional[WeightKind] = None
    convention: Convention = Convention.OFF_DIAGONAL
    estimate: float = Field(ge=0.0, le=1.0)
    se: Optional[float] = Field(default=None, ge=0.0)
    ci_lower: Optional[float] = None
    ci_upper: Optional[float] = None
    alpha: float = Field(gt=0.0, lt=1.0)
    n: int = Field(ge=1)
    skipped_pairs: int = 0
    se_status: SeStatus = SeStatus.OK
    ci_clipped: bool = False
    bootstrap_se: Optional[float] = None
    equivalent_delta: Optional[float] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_interval(self) -> "MeasureReport":
        if (self.ci_lower is None) != (self.ci_upper is None):
            raise ValueError("confidence interval needs both endpoints")
        if self.ci_lower is not None and not (self.ci_lower <= self.estimate <= self.ci_upper):
            raise ValueError(f"estimate {self.estimate} outside [{self.ci_lower}, {self.ci_upper}]")
        return self

    @property
    def ci(self) -> Optional[Tuple[float, float]]:
        if self.ci_lower is None:
            return None
        return (self.ci_lower, self.ci_upper)


class SymmetryTestResult(BaseModel):
    """Bowker's chi-squared test of p_ij = p_ji (McNemar for R = 2)."""

    statistic: float = Field(ge=0.0)
    df: int = Field(ge=0)
    p_value: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    empty_pairs: int = 0

    model_config = ConfigDict(frozen=True)

# asymmetry/schemas/geometry.py
from typing import Any, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from asymmetry.core.exceptions import ErrorCode, InputError

DISTRIBUTION_TOL = 1e-12


class ProbVector(BaseModel):
    """
    Probability vector p_1..p_l (l >= 2).

    With `is_distribution` the entries must sum to 1; otherwise the vector
    is taken as a square-root embedding whose squares sum to 1.
    """

    entries: Tuple[float, ...]
    is_distribution: bool = True

    model_config = ConfigDict(frozen=True)

    @field_validator("entries", mode="before")
    @classmethod
    def validate_entries(cls, value: Any) -> Tuple[float, ...]:
        entries = tuple(float(v) for v in np.asarray(value, dtype=np.float64).ravel())
        if len(entries) < 2:
            raise InputError("A probability vector needs at least 2 entries", error_code=ErrorCode.INVALID_PARAMETER)
        if any(not np.isfinite(v) or v < 0.0 for v in entries):
            raise InputError(
                "Probability vector entries must be finite and nonnegative",
                error_code=ErrorCode.INVALID_PARAMETER,
                details={"entries": list(entries)},
            )
        return entries

    @model_validator(mode="after")
    def check_mass(self) -> "ProbVector":
        values = self.as_array()
        mass = float(values.sum()) if self.is_distribution else float(np.dot(values, values))
        if abs(mass - 1.0) > DISTRIBUTION_TOL:
            raise InputError(
                f"Probability vector mass is {mass!r}, expected 1",
                error_code=ErrorCode.INVALID_PARAMETER,
            )
        return self

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.float64)

    def sqrt_embedding(self) -> np.ndarray:
        if not self.is_distribution:
            return self.as_array()
        return np.sqrt(self.as_array())


class CurveSample(BaseModel):
    """Distances from the pair point (p^c, 1 - p^c) to s = (1/2, 1/2)."""

    pc: float
    ed: float
    frd: float
    hd: float

    model_config = ConfigDict(frozen=True)

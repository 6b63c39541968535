# asymmetry/schemas/table.py
from enum import Enum
from typing import Any, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field, field_validator, model_validator

from asymmetry.core.exceptions import ErrorCode, InputError

# Largest count that survives a float carrier exactly.
MAX_COUNT = 2**53 - 1
NORMALIZATION_TOL = 1e-12


class Convention(str, Enum):
    """Which cells the probabilities are normalized over."""
    OFF_DIAGONAL = "offdiag"
    FULL = "full"


class ZeroPairPolicy(str, Enum):
    """What to do with a cell pair whose two counts are both zero."""
    ERROR = "error"
    SKIP = "skip"


def _square_rows(value: Any, what: str) -> list:
    if isinstance(value, np.ndarray):
        value = value.tolist()
    try:
        rows = [list(row) for row in value]
    except TypeError:
        raise InputError(f"{what} must be a grid of rows", details={"received": type(value).__name__})

    dim = len(rows)
    if dim < 2:
        raise InputError(f"{what} must have at least 2 rows, got {dim}", details={"rows": dim})
    for i, row in enumerate(rows):
        if len(row) != dim:
            raise InputError(
                f"{what} is not square: row {i + 1} has {len(row)} fields, expected {dim}",
                details={"row": i + 1, "fields": len(row), "expected": dim},
            )
    return rows


class CountTable(BaseModel):
    """R×R grid of nonnegative integer counts n_ij."""

    counts: Tuple[Tuple[int, ...], ...]

    model_config = ConfigDict(frozen=True)

    @field_validator("counts", mode="before")
    @classmethod
    def validate_counts(cls, value: Any) -> Tuple[Tuple[int, ...], ...]:
        rows = _square_rows(value, "Count table")
        validated = []
        for i, row in enumerate(rows):
            cells = []
            for j, cell in enumerate(row):
                location = {"row": i + 1, "column": j + 1, "value": repr(cell)}
                if isinstance(cell, (bool, np.bool_)):
                    raise InputError(f"Non-integer count at ({i + 1},{j + 1}): {cell!r}", details=location)
                if isinstance(cell, (float, np.floating)):
                    if not float(cell).is_integer():
                        raise InputError(f"Non-integer count at ({i + 1},{j + 1}): {cell!r}", details=location)
                    cell = int(cell)
                if not isinstance(cell, (int, np.integer)):
                    raise InputError(f"Non-integer count at ({i + 1},{j + 1}): {cell!r}", details=location)
                cell = int(cell)
                if cell < 0:
                    raise InputError(f"Negative count at ({i + 1},{j + 1}): {cell}", details=location)
                if cell > MAX_COUNT:
                    raise InputError(
                        f"Count at ({i + 1},{j + 1}) exceeds 2^53-1",
                        details={**location, "max": MAX_COUNT},
                    )
                cells.append(cell)
            validated.append(tuple(cells))
        return tuple(validated)

    @model_validator(mode="after")
    def check_off_diagonal(self) -> "CountTable":
        if self.off_diagonal_total == 0:
            raise InputError(
                "All off-diagonal counts are zero; there is no asymmetry to measure",
                details={"dim": self.dim},
            )
        return self

    @computed_field
    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def off_diagonal_total(self) -> int:
        return sum(c for i, row in enumerate(self.counts) for j, c in enumerate(row) if i != j)

    def effective_n(self, convention: Convention) -> int:
        """Sample size used by the SE under the given convention."""
        if convention == Convention.FULL:
            return self.total
        return self.off_diagonal_total

    def as_array(self, dtype: Any = np.float64) -> np.ndarray:
        return np.array(self.counts, dtype=dtype)

    @classmethod
    def from_array(cls, array: Any) -> "CountTable":
        return cls(counts=array)


class ProbTable(BaseModel):
    """R×R probabilities p_ij with a declared normalization convention."""

    probs: Tuple[Tuple[float, ...], ...]
    convention: Convention = Convention.OFF_DIAGONAL

    model_config = ConfigDict(frozen=True)

    @field_validator("probs", mode="before")
    @classmethod
    def validate_probs(cls, value: Any) -> Tuple[Tuple[float, ...], ...]:
        rows = _square_rows(value, "Probability table")
        validated = []
        for i, row in enumerate(rows):
            cells = []
            for j, cell in enumerate(row):
                try:
                    cell = float(cell)
                except (TypeError, ValueError):
                    raise InputError(
                        f"Non-numeric probability at ({i + 1},{j + 1})",
                        details={"row": i + 1, "column": j + 1},
                    )
                if not np.isfinite(cell) or cell < 0.0:
                    raise InputError(
                        f"Probability at ({i + 1},{j + 1}) must be finite and nonnegative, got {cell}",
                        details={"row": i + 1, "column": j + 1, "value": cell},
                    )
                cells.append(cell)
            validated.append(tuple(cells))
        return tuple(validated)

    @model_validator(mode="after")
    def check_normalization(self) -> "ProbTable":
        normalizer = self.normalizer
        if abs(normalizer - 1.0) > NORMALIZATION_TOL:
            raise InputError(
                f"Probabilities sum to {normalizer!r} under the {self.convention.value} convention",
                details={"convention": self.convention.value, "sum": normalizer},
            )
        return self

    @computed_field
    @property
    def dim(self) -> int:
        return len(self.probs)

    @property
    def normalizer(self) -> float:
        p = self.as_array()
        if self.convention == Convention.FULL:
            return float(p.sum())
        return self.off_diagonal_mass

    @property
    def off_diagonal_mass(self) -> float:
        p = self.as_array()
        return float(p.sum() - np.trace(p))

    def as_array(self) -> np.ndarray:
        return np.array(self.probs, dtype=np.float64)

    @classmethod
    def from_array(cls, array: Any, convention: Convention = Convention.OFF_DIAGONAL) -> "ProbTable":
        return cls(probs=array, convention=convention)


class PairPoint(BaseModel):
    """Conditional pair (p^c_ij, p^c_ji) on the segment forward + backward = 1."""

    forward: float
    backward: float

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_segment(self) -> "PairPoint":
        for name, value in (("forward", self.forward), ("backward", self.backward)):
            if not 0.0 <= value <= 1.0:
                raise InputError(
                    f"Conditional probability {name}={value} is outside [0, 1]",
                    error_code=ErrorCode.INVALID_PARAMETER,
                )
        if abs(self.forward + self.backward - 1.0) > NORMALIZATION_TOL:
            raise InputError(
                f"Conditional pair does not sum to 1: {self.forward} + {self.backward}",
                error_code=ErrorCode.INVALID_PARAMETER,
            )
        return self

    def embedding(self) -> np.ndarray:
        """Square-root embedding on the unit circle."""
        return np.sqrt(np.array([self.forward, self.backward]))

    def as_array(self) -> np.ndarray:
        return np.array([self.forward, self.backward])


SYMMETRIC_POINT = PairPoint(forward=0.5, backward=0.5)

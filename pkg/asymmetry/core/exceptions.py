# asymmetry/core/exceptions.py
from enum import Enum
from typing import Any, Dict, Optional


class ErrorCode(str, Enum):
    """Standard error codes."""
    INVALID_CSV = "INVALID_CSV"
    INVALID_TABLE = "INVALID_TABLE"
    INVALID_PARAMETER = "INVALID_PARAMETER"
    ZERO_PAIR = "ZERO_PAIR"
    BOUNDARY_GRADIENT = "BOUNDARY_GRADIENT"
    DOMAIN_ERROR = "DOMAIN_ERROR"
    COMPUTATION_ERROR = "COMPUTATION_ERROR"
    ACCEPTANCE_GATE = "ACCEPTANCE_GATE"


# Input problems exit with 2, computation problems with 3.
EXIT_CODES: Dict[ErrorCode, int] = {
    ErrorCode.INVALID_CSV: 2,
    ErrorCode.INVALID_TABLE: 2,
    ErrorCode.INVALID_PARAMETER: 2,
    ErrorCode.ZERO_PAIR: 3,
    ErrorCode.BOUNDARY_GRADIENT: 3,
    ErrorCode.DOMAIN_ERROR: 3,
    ErrorCode.COMPUTATION_ERROR: 3,
    ErrorCode.ACCEPTANCE_GATE: 3,
}


class AsymmetryError(Exception):
    """Base exception of the package."""

    def __init__(
        self,
        message: str,
        error_code: ErrorCode,
        details: Optional[Dict[str, Any]] = None,
        user_message: Optional[str] = None,
    ):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        self.user_message = user_message or self._get_user_friendly_message()
        super().__init__(self.message)

    def _get_user_friendly_message(self) -> str:
        """Returns a short message suitable for the terminal."""
        friendly_messages = {
            ErrorCode.INVALID_CSV: "The input file is not a valid table CSV.",
            ErrorCode.INVALID_TABLE: "The table does not satisfy the square contingency table rules.",
            ErrorCode.INVALID_PARAMETER: "An option value is out of range.",
            ErrorCode.ZERO_PAIR: "A symmetric cell pair has no observations; use --zero-pair-policy skip.",
            ErrorCode.BOUNDARY_GRADIENT: "The standard error is not available on the boundary of the simplex.",
            ErrorCode.DOMAIN_ERROR: "A special function was called outside its domain.",
            ErrorCode.COMPUTATION_ERROR: "The computation failed.",
            ErrorCode.ACCEPTANCE_GATE: "A numerical self-check failed.",
        }
        return friendly_messages.get(self.error_code, "An unexpected error occurred.")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self.error_code, 3)

    def to_dict(self) -> Dict[str, Any]:
        """Converts the exception to a dictionary."""
        return {
            "error_code": self.error_code.value,
            "message": self.message,
            "user_message": self.user_message,
            "details": self.details,
        }


class InputError(AsymmetryError):
    """Malformed input files and invalid parameters."""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.INVALID_TABLE, **kwargs: Any):
        super().__init__(message, error_code, **kwargs)


class ZeroPairError(AsymmetryError):
    """A cell pair with p_ij + p_ji = 0 under the `error` policy."""

    def __init__(self, i: int, j: int, **kwargs: Any):
        super().__init__(
            f"Cell pair ({i + 1},{j + 1})/({j + 1},{i + 1}) has zero total mass",
            ErrorCode.ZERO_PAIR,
            details={"row": i + 1, "column": j + 1},
            **kwargs,
        )


class BoundaryGradientError(AsymmetryError):
    """A partial derivative diverges because an off-diagonal cell is zero."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, ErrorCode.BOUNDARY_GRADIENT, details=details)


class DomainError(AsymmetryError):
    """Special-function arguments outside the supported domain."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, ErrorCode.DOMAIN_ERROR, details=details)


class ComputationError(AsymmetryError):
    """Numerical failures and failed self-checks."""

    def __init__(
        self,
        message: str,
        error_code: ErrorCode = ErrorCode.COMPUTATION_ERROR,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message, error_code, details=details)

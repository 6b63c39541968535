# asymmetry/schemas/document.py
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from asymmetry.schemas.measures import MeasureReport, SymmetryTestResult, WeightKind
from asymmetry.schemas.table import Convention, ZeroPairPolicy

SCHEMA_VERSION = "1.0"


class InputDigest(BaseModel):
    source: str
    sha256: str
    dim: int
    total: int
    off_diagonal_total: int
    convention: Convention
    effective_n: int

    model_config = ConfigDict(frozen=True)


class AnalysisOptions(BaseModel):
    weights: List[WeightKind]
    lambdas: List[float]
    alpha: float
    normalization: Convention
    zero_pair_policy: ZeroPairPolicy
    bootstrap_reps: Optional[int] = None
    seed: Optional[int] = None

    model_config = ConfigDict(frozen=True)


class AnalysisDocument(BaseModel):
    """Everything `analyze` reports for one input table."""

    schema_version: str = SCHEMA_VERSION
    input: InputDigest
    options: AnalysisOptions
    measures: List[MeasureReport] = Field(default_factory=list)
    symmetry_test: SymmetryTestResult
    weight_spread: Optional[float] = None
    warnings: List[str] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    def phi_report(self, weight: WeightKind) -> MeasureReport:
        for report in self.measures:
            if report.lam is None and report.weight == weight:
                return report
        raise KeyError(weight)

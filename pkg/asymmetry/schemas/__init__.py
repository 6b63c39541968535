from asymmetry.schemas.document import AnalysisDocument, AnalysisOptions, InputDigest
from asymmetry.schemas.geometry import CurveSample, ProbVector
from asymmetry.schemas.measures import (
    AsymmetryValue,
    MeasureKind,
    MeasureReport,
    SeStatus,
    SymmetryTestResult,
    WeightKind,
    WeightMap,
    WeightScheme,
)
from asymmetry.schemas.simulation import CoverageResult, CsSpec, PowerValue, SweepRow
from asymmetry.schemas.table import (
    SYMMETRIC_POINT,
    Convention,
    CountTable,
    PairPoint,
    ProbTable,
    ZeroPairPolicy,
)

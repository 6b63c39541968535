# asymmetry/reports/writers.py
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel

from asymmetry.core.exceptions import ErrorCode, InputError
from asymmetry.schemas.document import AnalysisDocument
from asymmetry.schemas.geometry import CurveSample
from asymmetry.schemas.simulation import SweepRow

logger = logging.getLogger(__name__)

ANALYSIS_COLUMNS = [
    "measure", "lambda", "weight", "convention", "estimate", "se", "ci_lower", "ci_upper",
    "alpha", "n", "se_status", "ci_clipped", "skipped_pairs", "bootstrap_se", "equivalent_delta",
    "statistic", "df", "p_value",
]


def csv_number(value: Optional[Union[float, int]]) -> str:
    """6 significant digits; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else csv_number(cell) for cell in row])
    return buffer.getvalue()


def sweep_csv(rows: List[SweepRow]) -> str:
    lambdas = [item.lam for item in rows[0].power] if rows else []
    header = ["delta", "pc", "sqrt_pc", "phi"] + [f"phi_power_{lam:g}" for lam in lambdas]
    return write_csv(
        header,
        ([row.delta, row.pc, row.sqrt_pc, row.phi] + [item.value for item in row.power] for row in rows),
    )


def curve_csv(samples: List[CurveSample]) -> str:
    return write_csv(["pc", "ed", "frd", "hd"], ([s.pc, s.ed, s.frd, s.hd] for s in samples))


def analysis_csv(document: AnalysisDocument) -> str:
    """One row per measure report and a final row for Bowker's test."""
    rows = []
    for report in document.measures:
        rows.append([
            report.measure.value,
            report.lam,
            report.weight.value if report.weight else "",
            report.convention.value,
            report.estimate,
            report.se,
            report.ci_lower,
            report.ci_upper,
            report.alpha,
            report.n,
            report.se_status.value,
            report.ci_clipped,
            report.skipped_pairs,
            report.bootstrap_se,
            report.equivalent_delta,
            None, None, None,
        ])
    test = document.symmetry_test
    rows.append(["bowker"] + [None] * 14 + [test.statistic, test.df, test.p_value])
    return write_csv(ANALYSIS_COLUMNS, rows)


def to_json(model: BaseModel) -> str:
    """Pretty JSON with shortest round-trip floats; field order is the model's."""
    return model.model_dump_json(indent=2) + "\n"


def emit(text: str, out: Optional[Union[str, Path]] = None) -> None:
    """
    Writes an artifact to `out`, or to stdout when no path is given.
    """
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as e:
        raise InputError(f"Cannot write {path}: {e.strerror}", error_code=ErrorCode.INVALID_PARAMETER,
                         details={"path": str(path)})
    logger.info(f"Wrote {path} ({len(text)} bytes)")

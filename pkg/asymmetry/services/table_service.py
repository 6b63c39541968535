# asymmetry/services/table_service.py
import hashlib
import logging
import re
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from asymmetry.core.exceptions import ErrorCode, InputError, ZeroPairError
from asymmetry.schemas.table import MAX_COUNT, Convention, CountTable, PairPoint, ProbTable, ZeroPairPolicy

logger = logging.getLogger(__name__)

_INTEGER = re.compile(r"^[+-]?\d+$")
_MAX_DIGITS = len(str(MAX_COUNT))


def parse_table(text: Union[str, bytes]) -> CountTable:
    """
    Parses a CSV document of R lines with R integer fields each.

    Lines starting with '#' are comments, blank lines are ignored, LF and
    CRLF endings are both accepted. There is no header row.

    Args:
        text: CSV document (str, or UTF-8 bytes)

    Returns:
        Validated CountTable

    Raises:
        InputError: with the offending line/column in `details`
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InputError(f"Input is not valid UTF-8: {e}", error_code=ErrorCode.INVALID_CSV)
    text = text.lstrip("﻿")

    rows: List[List[int]] = []
    lines: List[int] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = []
        for column, field in enumerate(stripped.split(","), start=1):
            field = field.strip()
            if not _INTEGER.match(field):
                raise InputError(
                    f"Line {line_number}, column {column}: {field!r} is not an integer",
                    error_code=ErrorCode.INVALID_CSV,
                    details={"line": line_number, "column": column, "field": field},
                )
            if len(field.lstrip("+-").lstrip("0")) > _MAX_DIGITS:
                raise InputError(
                    f"Line {line_number}, column {column}: count exceeds 2^53-1",
                    error_code=ErrorCode.INVALID_CSV,
                    details={"line": line_number, "column": column, "digits": len(field)},
                )
            value = int(field)
            if value < 0:
                raise InputError(
                    f"Line {line_number}, column {column}: negative count {value}",
                    details={"line": line_number, "column": column, "value": value},
                )
            row.append(value)
        rows.append(row)
        lines.append(line_number)

    dim = len(rows)
    if dim < 2:
        raise InputError(f"A table needs at least 2 rows, found {dim}", details={"rows": dim})
    for row, line_number in zip(rows, lines):
        if len(row) != dim:
            raise InputError(
                f"Line {line_number}: {len(row)} fields in a table with {dim} rows (table must be square)",
                details={"line": line_number, "fields": len(row), "expected": dim},
            )

    table = CountTable(counts=rows)
    logger.debug(f"Parsed {dim}x{dim} table, total={table.total}, off-diagonal={table.off_diagonal_total}")
    return table


def serialize_table(table: CountTable) -> str:
    """Writes the table in the format read by `parse_table`."""
    return "".join(",".join(str(c) for c in row) + "\n" for row in table.counts)


def read_table(path: Union[str, Path]) -> Tuple[CountTable, str]:
    """
    Reads a table file from disk.

    Returns:
        Tuple (table, sha256 hex digest of the file bytes)
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}", error_code=ErrorCode.INVALID_CSV,
                         details={"path": str(path)})
    return parse_table(data), hashlib.sha256(data).hexdigest()


def to_probabilities(table: CountTable, convention: Convention = Convention.OFF_DIAGONAL) -> ProbTable:
    """
    Plug-in probabilities p_ij = n_ij / n.

    n is the off-diagonal total under OFF_DIAGONAL and the grand total
    under FULL. Diagonal cells are carried in both cases.
    """
    n = table.effective_n(convention)
    if n <= 0:
        raise InputError("Zero normalizer", details={"convention": convention.value})
    return ProbTable(probs=table.as_array() / n, convention=convention)


def conditional_pair(probs: ProbTable, i: int, j: int) -> PairPoint:
    """
    Conditional pair (p_ij / (p_ij + p_ji), p_ji / (p_ij + p_ji)).

    Indices are zero-based.
    """
    dim = probs.dim
    if not (0 <= i < dim and 0 <= j < dim):
        raise InputError(f"Cell ({i},{j}) outside a {dim}x{dim} table", error_code=ErrorCode.INVALID_PARAMETER)
    if i == j:
        raise InputError("Conditional pairs are defined off the diagonal only", error_code=ErrorCode.INVALID_PARAMETER)

    p_ij = probs.probs[i][j]
    p_ji = probs.probs[j][i]
    mass = p_ij + p_ji
    if mass == 0.0:
        raise ZeroPairError(min(i, j), max(i, j))
    return PairPoint(forward=p_ij / mass, backward=p_ji / mass)


def included_pairs(p: np.ndarray, policy: ZeroPairPolicy = ZeroPairPolicy.ERROR) -> Tuple[np.ndarray, int]:
    """
    Off-diagonal cells whose pair (i,j)/(j,i) carries positive mass.

    Args:
        p: R×R array of probabilities or counts
        policy: ERROR raises on the first empty pair, SKIP drops it

    Returns:
        Tuple (boolean R×R mask, number of skipped pairs)
    """
    dim = p.shape[0]
    pair_mass = p + p.T
    off = ~np.eye(dim, dtype=bool)
    mask = off & (pair_mass > 0.0)
    empty = np.argwhere(np.triu(off & ~mask))
    if len(empty):
        if policy == ZeroPairPolicy.ERROR:
            i, j = (int(k) for k in empty[0])
            raise ZeroPairError(i, j)
        logger.warning(f"Skipping {len(empty)} empty cell pair(s)")
    return mask, int(len(empty))

# asymmetry/tests/conftest.py
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np
import pytest

from asymmetry.cli import main
from asymmetry.config import get_settings
from asymmetry.core.replicates import get_replicate_runner
from asymmetry.schemas.table import CountTable
from asymmetry.services.table_service import read_table

ROOT = Path(__file__).resolve().parents[2]
DATA_DIR = ROOT / "data"
SCHEMA_FILE = ROOT / "schemas" / "analysis_document.schema.json"

DATASETS = ("shrinkage_2yr", "shrinkage_5yr", "induration_2yr", "induration_5yr")

# Published (estimate, SE, CI lower, CI upper) per dataset and weight scheme.
PUBLISHED = {
    ("shrinkage_2yr", "uniform"): (0.197, 0.047, 0.104, 0.289),
    ("shrinkage_2yr", "pair"): (0.172, 0.035, 0.103, 0.241),
    ("shrinkage_5yr", "uniform"): (0.109, 0.036, 0.039, 0.178),
    ("shrinkage_5yr", "pair"): (0.079, 0.036, 0.008, 0.149),
    ("induration_2yr", "uniform"): (0.447, 0.029, 0.391, 0.503),
    ("induration_2yr", "pair"): (0.434, 0.028, 0.378, 0.489),
    ("induration_5yr", "uniform"): (0.272, 0.030, 0.212, 0.331),
    ("induration_5yr", "pair"): (0.270, 0.028, 0.216, 0.324),
}

# Rounded published values carry at most half a unit in the last place.
ROUNDED_TOL = 5e-4 + 1e-12
SE_TOL = 2e-3


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings and the replicate runner are rebuilt for every test."""
    get_settings.cache_clear()
    get_replicate_runner.cache_clear()
    yield
    get_settings.cache_clear()
    get_replicate_runner.cache_clear()


@pytest.fixture(scope="session")
def datasets() -> Dict[str, CountTable]:
    """The four bundled tables, keyed by file stem."""
    return {name: read_table(DATA_DIR / f"{name}.csv")[0] for name in DATASETS}


@pytest.fixture
def shrinkage_2yr(datasets) -> CountTable:
    return datasets["shrinkage_2yr"]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


def random_interior(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Zero-diagonal table with off-diagonal entries in (0.05, 1), normalized to 1."""
    p = rng.uniform(0.05, 1.0, size=(dim, dim))
    np.fill_diagonal(p, 0.0)
    return p / p.sum()


@pytest.fixture
def interior_tables(rng) -> List[np.ndarray]:
    """100 random interior tables with R in 2..6."""
    return [random_interior(rng, int(rng.integers(2, 7))) for _ in range(100)]


@pytest.fixture
def symmetric_counts() -> CountTable:
    return CountTable(counts=[[10, 5, 3], [5, 7, 2], [3, 2, 9]])


@pytest.fixture
def run_cli(capsys, monkeypatch) -> Callable[..., Tuple[int, str, str]]:
    """Runs the CLI in-process; returns (exit code, stdout, stderr)."""
    # pytest owns the root handlers; the CLI only adjusts the level
    monkeypatch.setattr("asymmetry.core.logging_setup._configured", True)

    def _run(*argv: str) -> Tuple[int, str, str]:
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run

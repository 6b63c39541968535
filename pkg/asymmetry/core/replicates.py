# asymmetry/core/replicates.py
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, List, Optional, TypeVar

import numpy as np

from asymmetry.config import get_settings
from asymmetry.core.exceptions import ErrorCode, InputError

logger = logging.getLogger(__name__)

T = TypeVar("T")

# Philox seeds are taken modulo 2^64 by SeedSequence; reject anything outside.
MAX_SEED = 2**64 - 1


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """
    Generator for replicate `index` of a run with base seed `seed`.

    The stream depends only on (seed, index), never on which worker draws
    it or in which order replicates run.
    """
    if not 0 <= seed <= MAX_SEED:
        raise InputError(f"Seed must be in [0, 2^64), got {seed}", error_code=ErrorCode.INVALID_PARAMETER)
    if index < 0:
        raise InputError(f"Replicate index must be nonnegative, got {index}", error_code=ErrorCode.INVALID_PARAMETER)
    sequence = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(sequence))


class ReplicateRunner:
    """
    Runs independent replicates on a thread pool.

    Replicates are submitted in chunks; results come back in replicate
    order whatever the worker count.
    """

    def __init__(self, max_workers: Optional[int] = None, chunk_size: Optional[int] = None):
        settings = get_settings()
        self.max_workers = max_workers or settings.THREADS or 1
        self.chunk_size = chunk_size or settings.CHUNK_SIZE
        if self.max_workers < 1 or self.chunk_size < 1:
            raise InputError(
                f"Invalid runner configuration: workers={self.max_workers}, chunk={self.chunk_size}",
                error_code=ErrorCode.INVALID_PARAMETER,
            )

    def _run_chunk(self, fn: Callable[[int], T], start: int, stop: int) -> List[T]:
        return [fn(index) for index in range(start, stop)]

    def map(self, fn: Callable[[int], T], count: int, label: str = "replicates") -> List[T]:
        """
        Evaluates fn(0), ..., fn(count - 1).

        Args:
            fn: Replicate function; must derive its randomness from the index
            count: Number of replicates
            label: Name used in log messages

        Returns:
            List of results in index order
        """
        if count < 0:
            raise InputError(f"Replicate count must be nonnegative, got {count}", error_code=ErrorCode.INVALID_PARAMETER)

        started = time.perf_counter()
        bounds = [(start, min(start + self.chunk_size, count)) for start in range(0, count, self.chunk_size)]
        if self.max_workers == 1 or len(bounds) <= 1:
            results = [item for start, stop in bounds for item in self._run_chunk(fn, start, stop)]
        else:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                futures = [executor.submit(self._run_chunk, fn, start, stop) for start, stop in bounds]
                results = [item for future in futures for item in future.result()]

        elapsed = time.perf_counter() - started
        logger.info(f"Ran {count} {label} on {self.max_workers} worker(s) in {elapsed:.2f}s")
        return results


@lru_cache()
def get_replicate_runner() -> ReplicateRunner:
    """Runner configured from ASYMM_THREADS / ASYMM_CHUNK_SIZE."""
    return ReplicateRunner()

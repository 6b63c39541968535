# asymmetry/services/simulation_service.py
import logging
import math
import time
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from asymmetry.core.exceptions import ComputationError, ErrorCode, InputError, ZeroPairError
from asymmetry.core.replicates import ReplicateRunner, get_replicate_runner, replicate_rng
from asymmetry.schemas.measures import WeightScheme
from asymmetry.schemas.simulation import CoverageResult, CsSpec, PowerValue, SweepRow
from asymmetry.schemas.table import Convention, CountTable, ProbTable, ZeroPairPolicy
from asymmetry.services.inference_service import phi_interval
from asymmetry.services.measure_service import phi, phi_cs_closed, phi_power, phi_value

logger = logging.getLogger(__name__)

# Φ of a CS table must reproduce the closed form to this accuracy.
CLOSED_FORM_TOL = 1e-12
MIN_COVERAGE_REPS = 100


def cs_table(spec: CsSpec, convention: Convention = Convention.OFF_DIAGONAL) -> ProbTable:
    """
    Conditional symmetry table p_ij = Δψ_ij above the diagonal, ψ_ij below.

    Under OFF_DIAGONAL the diagonal carries no mass; under FULL it keeps
    ψ_ii and the table is normalized over every cell.
    """
    psi = spec.psi_array()
    dim = spec.dim
    upper = np.triu(np.ones((dim, dim), dtype=bool), k=1)
    p = np.where(upper, spec.delta * psi, psi)
    if convention == Convention.OFF_DIAGONAL:
        p = p * (1.0 - np.eye(dim))
    return ProbTable(probs=p / p.sum(), convention=convention)


def larger_conditional(delta: float) -> float:
    """Larger side of every conditional pair of a CS table, max(1, Δ)/(1 + Δ)."""
    return max(1.0, delta) / (1.0 + delta)


def delta_grid(delta_min: float, delta_max: float, step: float) -> List[float]:
    """
    Grid delta_min, delta_min + step, ... up to delta_max inclusive.

    Points are rounded to 12 decimals so that accumulated steps land on the
    nominal values (0.2, 0.4, ...).
    """
    for name, value in (("delta-min", delta_min), ("delta-max", delta_max), ("delta-step", step)):
        if not math.isfinite(value):
            raise InputError(f"{name} must be finite", error_code=ErrorCode.INVALID_PARAMETER)
    if delta_min < 0.0 or delta_max < delta_min:
        raise InputError(
            f"Invalid delta range [{delta_min}, {delta_max}]",
            error_code=ErrorCode.INVALID_PARAMETER,
            details={"delta_min": delta_min, "delta_max": delta_max},
        )
    if step <= 0.0:
        raise InputError(f"delta-step must be positive, got {step}", error_code=ErrorCode.INVALID_PARAMETER)

    count = int(math.floor((delta_max - delta_min) / step + 1e-9)) + 1
    return [round(delta_min + k * step, 12) for k in range(count)]


def sweep_cs(
    deltas: Iterable[float],
    lambdas: Sequence[float] = (-0.5, 0.0, 1.0),
    psi: Optional[Sequence[Sequence[float]]] = None,
) -> List[SweepRow]:
    """
    Φ and Φ^(λ) along a Δ grid of conditional symmetry tables.

    Args:
        deltas: Δ values (>= 0)
        lambdas: Power parameters for the Φ^(λ) columns
        psi: Symmetric base grid (default constant 3x3)

    Returns:
        One SweepRow per Δ, in grid order

    Raises:
        ComputationError: the Φ column departs from phi_cs_closed
    """
    rows = []
    for delta in deltas:
        spec = CsSpec(delta=delta, psi=psi) if psi is not None else CsSpec.uniform(delta)
        probs = cs_table(spec)
        value = phi(probs, policy=ZeroPairPolicy.SKIP).value
        closed = phi_cs_closed(spec.delta)
        if abs(value - closed) > CLOSED_FORM_TOL:
            raise ComputationError(
                f"phi at delta={spec.delta} is {value!r}, closed form gives {closed!r}",
                error_code=ErrorCode.ACCEPTANCE_GATE,
                details={"delta": spec.delta, "phi": value, "closed_form": closed},
            )
        pc = larger_conditional(spec.delta)
        rows.append(
            SweepRow(
                delta=spec.delta,
                pc=pc,
                sqrt_pc=math.sqrt(pc),
                phi=value,
                power=[PowerValue(lam=float(lam), value=phi_power(probs, lam).value) for lam in lambdas],
            )
        )
    logger.info(f"CS sweep: {len(rows)} rows, lambdas={list(lambdas)}")
    return rows


def _cell_probabilities(probs: ProbTable) -> np.ndarray:
    p = probs.as_array()
    if probs.convention == Convention.OFF_DIAGONAL:
        p = p * (1.0 - np.eye(probs.dim))
    return (p / p.sum()).ravel()


def sample_multinomial(probs: ProbTable, n: int, seed: int, index: int = 0) -> CountTable:
    """
    Draws a table of n observations from the cell probabilities.

    Under OFF_DIAGONAL only off-diagonal cells are sampled. The draw uses
    the replicate generator of (seed, index).
    """
    if n < 1:
        raise InputError(f"Sample size must be positive, got {n}", error_code=ErrorCode.INVALID_PARAMETER)
    counts = replicate_rng(seed, index).multinomial(n, _cell_probabilities(probs))
    return CountTable(counts=counts.reshape(probs.dim, probs.dim))


def coverage_experiment(
    spec: CsSpec,
    n: int,
    reps: int,
    alpha: float = 0.05,
    scheme: Optional[WeightScheme] = None,
    seed: int = 0,
    runner: Optional[ReplicateRunner] = None,
) -> CoverageResult:
    """
    Empirical coverage of the delta-method interval for Φ on a CS model.

    Replicate k samples n observations from cs_table(spec) with the
    generator of (seed, k) and checks whether its interval covers
    phi_cs_closed(Δ). Replicates without an interval (zero cells, empty
    pairs) are tallied as not available.
    """
    scheme = scheme or WeightScheme.uniform()
    if reps < MIN_COVERAGE_REPS:
        raise InputError(
            f"Coverage needs at least {MIN_COVERAGE_REPS} replicates, got {reps}",
            error_code=ErrorCode.INVALID_PARAMETER,
        )
    if n < 1:
        raise InputError(f"Sample size must be positive, got {n}", error_code=ErrorCode.INVALID_PARAMETER)

    probs = cs_table(spec)
    truth = phi_cs_closed(spec.delta)
    started = time.perf_counter()
    logger.info(f"Coverage: delta={spec.delta} dim={spec.dim} n={n} reps={reps} alpha={alpha} seed={seed}")

    def replicate(index: int) -> Tuple[bool, bool, float]:
        table = sample_multinomial(probs, n, seed, index)
        try:
            report = phi_interval(table, scheme, alpha)
        except ZeroPairError:
            return False, False, 0.0
        if report.ci is None:
            return False, False, 0.0
        lower, upper = report.ci
        return True, lower <= truth <= upper, upper - lower

    runner = runner or get_replicate_runner()
    outcomes = runner.map(replicate, reps, label="coverage replicates")

    available = sum(1 for ok, _, _ in outcomes if ok)
    covered = sum(1 for ok, hit, _ in outcomes if ok and hit)
    widths = [width for ok, _, width in outcomes if ok]
    result = CoverageResult(
        delta=spec.delta,
        dim=spec.dim,
        n=n,
        reps=reps,
        alpha=alpha,
        weight=scheme.kind,
        seed=seed,
        truth=truth,
        covered=covered,
        available=available,
        not_available=reps - available,
        rate=covered / available if available else None,
        mean_width=float(np.mean(widths)) if widths else None,
    )
    logger.info(
        f"Coverage done in {time.perf_counter() - started:.2f}s: "
        f"rate={result.rate}, not available={result.not_available}"
    )
    return result


def consistency_errors(
    spec: CsSpec,
    n: int,
    seeds: Sequence[int],
    scheme: Optional[WeightScheme] = None,
    runner: Optional[ReplicateRunner] = None,
) -> List[float]:
    """|Φ̂ - Φ| for one sample of size n per seed."""
    scheme = scheme or WeightScheme.uniform()
    probs = cs_table(spec)
    truth = phi_cs_closed(spec.delta)

    def replicate(index: int) -> float:
        table = sample_multinomial(probs, n, seeds[index])
        return abs(phi_value(table.as_array(), scheme, ZeroPairPolicy.SKIP) - truth)

    runner = runner or get_replicate_runner()
    return runner.map(replicate, len(seeds), label="consistency samples")

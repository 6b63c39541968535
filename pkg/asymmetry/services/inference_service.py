# asymmetry/services/inference_service.py
import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy import special

from asymmetry.core.exceptions import (
    AsymmetryError,
    BoundaryGradientError,
    ComputationError,
    DomainError,
    ErrorCode,
    InputError,
)
from asymmetry.core.replicates import ReplicateRunner, get_replicate_runner, replicate_rng
from asymmetry.schemas.measures import (
    MeasureKind,
    MeasureReport,
    SeStatus,
    SymmetryTestResult,
    WeightKind,
    WeightScheme,
)
from asymmetry.schemas.table import Convention, CountTable, ProbTable, ZeroPairPolicy
from asymmetry.services.measure_service import (
    QUARTER_PI,
    _check_lambda,
    _weights_for,
    pair_arcs,
    phi,
    phi_power,
    phi_power_value,
    phi_value,
)
from asymmetry.services.table_service import to_probabilities

logger = logging.getLogger(__name__)

# Rounding slack allowed on a variance before it is treated as an error.
VARIANCE_FLOOR = -1e-12


def _boundary_cells(p: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.argwhere(mask & (p == 0.0))


def phi_gradient(
    probs: ProbTable,
    scheme: Optional[WeightScheme] = None,
    policy: ZeroPairPolicy = ZeroPairPolicy.ERROR,
) -> np.ndarray:
    """
    Partial derivatives ∂Φ/∂p_st, derived directly from the definition of Φ.

    For a pair with a = p_st, b = p_ts the arc term contributes

        (w_st + w_ts) · (4/π) · sign(√a - √b) · √b / (2√a (a + b))

    which is 0 at ties. Pair-proportional weights add the quotient-rule
    term (r_st - Φ) / S with S the off-diagonal mass; uniform and custom
    weights are constant.

    Args:
        probs: Probability table
        scheme: Weight scheme (default uniform)
        policy: Zero-pair policy

    Returns:
        R×R array, zero on the diagonal and on skipped pairs

    Raises:
        BoundaryGradientError: an included off-diagonal cell is 0
    """
    scheme = scheme or WeightScheme.uniform()
    p = probs.as_array()
    mask, weights, _ = _weights_for(p, scheme, policy)

    boundary = _boundary_cells(p, mask)
    if len(boundary):
        s, t = (int(k) for k in boundary[0])
        raise BoundaryGradientError(
            f"Cell ({s + 1},{t + 1}) is zero; the derivative of its arc diverges",
            details={"row": s + 1, "column": t + 1, "zero_cells": len(boundary)},
        )

    a = np.where(mask, p, 1.0)
    b = a.T
    root_a = np.sqrt(a)
    root_b = np.sqrt(b)
    arc_slope = np.sign(root_a - root_b) * root_b / (2.0 * root_a * (a + b)) / QUARTER_PI

    w = weights / weights.sum()
    gradient = np.where(mask, (w + w.T) * arc_slope, 0.0)

    if scheme.kind == WeightKind.PAIR:
        off_mass = p.sum() - np.trace(p)
        arcs = pair_arcs(p, mask)
        value = float(np.sum(weights * arcs) / np.sum(weights))
        off = ~np.eye(p.shape[0], dtype=bool)
        gradient = gradient + np.where(mask, arcs, 0.0) / off_mass - np.where(off, value / off_mass, 0.0)

    return gradient


def _variance(gradient: np.ndarray, p: np.ndarray) -> float:
    mean = float(np.sum(gradient * p))
    variance = float(np.sum(gradient * gradient * p)) - mean * mean
    if variance < VARIANCE_FLOOR:
        raise ComputationError(f"Negative variance {variance!r}", details={"variance": variance})
    return max(0.0, variance)


def phi_variance(
    probs: ProbTable,
    scheme: Optional[WeightScheme] = None,
    policy: ZeroPairPolicy = ZeroPairPolicy.ERROR,
) -> float:
    """Asymptotic variance σ²[Φ̂] = Σ G² p - (Σ G p)² of the delta method."""
    return _variance(phi_gradient(probs, scheme, policy), probs.as_array())


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must be in (0, 1), got {alpha!r}", error_code=ErrorCode.INVALID_PARAMETER)
    return alpha


def _report(
    estimate: float,
    variance: Optional[float],
    n: int,
    alpha: float,
    status: SeStatus,
    **fields,
) -> MeasureReport:
    if variance is None:
        return MeasureReport(estimate=estimate, alpha=alpha, n=n, se_status=SeStatus.BOUNDARY, **fields)

    se = math.sqrt(variance / n)
    if se == 0.0:
        status = SeStatus.DEGENERATE
    z = inverse_normal_cdf(1.0 - alpha / 2.0)
    lower = estimate - z * se
    upper = estimate + z * se
    clipped = lower < 0.0 or upper > 1.0
    return MeasureReport(
        estimate=estimate,
        se=se,
        ci_lower=max(0.0, lower),
        ci_upper=min(1.0, upper),
        alpha=alpha,
        n=n,
        se_status=status,
        ci_clipped=clipped,
        **fields,
    )


def phi_interval(
    table: CountTable,
    scheme: Optional[WeightScheme] = None,
    alpha: float = 0.05,
    convention: Convention = Convention.OFF_DIAGONAL,
    policy: ZeroPairPolicy = ZeroPairPolicy.ERROR,
) -> MeasureReport:
    """
    Estimate, standard error and clipped confidence interval for Φ.

    SE = σ̂/√n with n the effective sample size of the convention. On the
    boundary of the simplex SE and CI are left empty and the estimate is
    still reported.
    """
    scheme = scheme or WeightScheme.uniform()
    alpha = _check_alpha(alpha)
    probs = to_probabilities(table, convention)
    value = phi(probs, scheme, policy)

    try:
        variance = phi_variance(probs, scheme, policy)
    except BoundaryGradientError as e:
        logger.warning(f"SE not available for phi[{scheme.kind.value}]: {e.message}")
        variance = None

    report = _report(
        value.value,
        variance,
        table.effective_n(convention),
        alpha,
        SeStatus.OK,
        measure=MeasureKind.PHI,
        weight=scheme.kind,
        convention=convention,
        skipped_pairs=value.skipped_pairs,
    )
    if report.se_status == SeStatus.DEGENERATE:
        logger.warning(f"Degenerate SE for phi[{scheme.kind.value}]: every included pair is tied")
    return report


def phi_power_gradient(probs: ProbTable, lam: float) -> np.ndarray:
    """
    Partial derivatives of Φ^(λ) with respect to the off-diagonal cells.

    With S the off-diagonal mass, q = (p + pᵀ)/2 and T = Σ p^(1+λ) q^(-λ),
    Φ^(λ) = (T/S - 1)/(2^λ - 1) and

        ∂T/∂p_st = (1+λ)(p_st/q)^λ - (λ/2)[(p_st/q)^(1+λ) + (p_ts/q)^(1+λ)]

    At λ = 0 the Kullback-Leibler branch gives ∂U/∂p_st = ln(p_st/q).

    Raises:
        BoundaryGradientError: a partial is not finite (zero cell, λ <= 0)
    """
    lam = _check_lambda(lam)
    p = probs.as_array()
    dim = p.shape[0]
    off = ~np.eye(dim, dtype=bool)
    p = np.where(off, p, 0.0)
    mass = p.sum()
    q = (p + p.T) / 2.0
    live = off & (q > 0.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(live, p / np.where(live, q, 1.0), 0.0)
        if lam == 0.0:
            support = ratio > 0.0
            total = float(np.sum(p[support] * np.log(ratio[support])))
            partial = np.where(live, np.log(ratio), 0.0)
            gradient = (partial / mass - total / mass**2) / math.log(2.0)
        else:
            total = float(np.sum(np.where(live, p * ratio**lam, 0.0)))
            partial = np.where(
                live,
                (1.0 + lam) * ratio**lam - (lam / 2.0) * (ratio ** (1.0 + lam) + ratio.T ** (1.0 + lam)),
                0.0,
            )
            gradient = (partial / mass - total / mass**2) / math.expm1(lam * math.log(2.0))

    gradient = np.where(off, gradient, 0.0)
    bad = np.argwhere(~np.isfinite(gradient))
    if len(bad):
        s, t = (int(k) for k in bad[0])
        raise BoundaryGradientError(
            f"Partial of phi^({lam}) at cell ({s + 1},{t + 1}) is not finite",
            details={"row": s + 1, "column": t + 1, "lambda": lam},
        )
    return gradient


def phi_power_interval(
    table: CountTable,
    lam: float,
    alpha: float = 0.05,
    convention: Convention = Convention.OFF_DIAGONAL,
) -> MeasureReport:
    """Estimate, delta-method SE and clipped CI for Φ^(λ)."""
    alpha = _check_alpha(alpha)
    probs = to_probabilities(table, convention)
    value = phi_power(probs, lam)
    try:
        variance = _variance(phi_power_gradient(probs, lam), probs.as_array())
    except BoundaryGradientError as e:
        logger.warning(f"SE not available for phi^({lam}): {e.message}")
        variance = None

    return _report(
        value.value,
        variance,
        table.effective_n(convention),
        alpha,
        SeStatus.OK,
        measure=MeasureKind.PHI_POWER,
        lam=float(lam),
        convention=convention,
    )


def bowker(table: CountTable) -> SymmetryTestResult:
    """
    Bowker's test of symmetry.

    χ²_S = Σ_{i<j} (n_ij - n_ji)² / (n_ij + n_ji); empty pairs are left out
    and reduce the degrees of freedom. For R = 2 this is McNemar's test.
    """
    counts = table.counts
    statistic = 0.0
    df = 0
    empty = 0
    for i in range(table.dim):
        for j in range(i + 1, table.dim):
            pair_total = counts[i][j] + counts[j][i]
            if pair_total == 0:
                empty += 1
                continue
            difference = counts[i][j] - counts[j][i]
            statistic += difference * difference / pair_total
            df += 1

    p_value = chi_square_sf(statistic, df) if df > 0 else None
    if df == 0:
        logger.warning("Every cell pair is empty; Bowker p-value not available")
    return SymmetryTestResult(statistic=statistic, df=df, p_value=p_value, empty_pairs=empty)


def mcnemar(table: CountTable) -> SymmetryTestResult:
    if table.dim != 2:
        raise InputError(f"McNemar's test needs a 2x2 table, got {table.dim}x{table.dim}",
                         error_code=ErrorCode.INVALID_PARAMETER)
    return bowker(table)


def chi_square_sf(x: float, df: int) -> float:
    """
    Upper tail of the chi-squared distribution, Q(df/2, x/2).

    Args:
        x: Statistic, x >= 0
        df: Degrees of freedom, a positive integer
    """
    if isinstance(df, bool) or int(df) != df or df < 1:
        raise DomainError(f"df must be a positive integer, got {df!r}", details={"df": df})
    x = float(x)
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"x must be nonnegative, got {x!r}", details={"x": x})
    return float(special.gammaincc(df / 2.0, x / 2.0))


def normal_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return float(0.5 * special.erfc(-float(z) / math.sqrt(2.0)))


def inverse_normal_cdf(q: float) -> float:
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError(f"Quantile level must be in (0, 1), got {q!r}", details={"q": q})
    return float(special.ndtri(q))


def _sampling_vector(probs: ProbTable) -> np.ndarray:
    p = probs.as_array()
    if probs.convention == Convention.OFF_DIAGONAL:
        p = p * (1.0 - np.eye(probs.dim))
    return (p / p.sum()).ravel()


def _bootstrap(
    table: CountTable,
    statistic: Callable[[np.ndarray], float],
    reps: int,
    seed: int,
    convention: Convention,
    runner: Optional[ReplicateRunner],
    label: str,
) -> float:
    if reps < 2:
        raise InputError(f"Bootstrap needs at least 2 replicates, got {reps}", error_code=ErrorCode.INVALID_PARAMETER)

    probs = to_probabilities(table, convention)
    pvals = _sampling_vector(probs)
    n = table.effective_n(convention)
    shape = (table.dim, table.dim)

    def replicate(index: int) -> float:
        counts = replicate_rng(seed, index).multinomial(n, pvals).reshape(shape)
        try:
            return statistic(counts)
        except AsymmetryError:
            return float("nan")

    runner = runner or get_replicate_runner()
    values = np.array(runner.map(replicate, reps, label=label))
    failed = int(np.isnan(values).sum())
    if failed:
        logger.warning(f"{failed} {label} had no usable estimate")
    if reps - failed < 2:
        raise ComputationError("Too few usable bootstrap replicates", details={"failed": failed, "reps": reps})
    return float(np.nanstd(values, ddof=1))


def bootstrap_se(
    table: CountTable,
    scheme: Optional[WeightScheme] = None,
    reps: int = 10_000,
    seed: int = 0,
    convention: Convention = Convention.OFF_DIAGONAL,
    policy: ZeroPairPolicy = ZeroPairPolicy.SKIP,
    runner: Optional[ReplicateRunner] = None,
) -> float:
    """
    Multinomial bootstrap standard error of Φ̂.

    Replicate k resamples n cells from the plug-in probabilities with the
    generator of (seed, k). Empty pairs in a resample are skipped by
    default.

    Returns:
        Sample standard deviation of the replicate estimates
    """
    scheme = scheme or WeightScheme.uniform()
    return _bootstrap(
        table,
        lambda counts: phi_value(counts, scheme, policy),
        reps,
        seed,
        convention,
        runner,
        label="bootstrap replicates",
    )


def bootstrap_power_se(
    table: CountTable,
    lam: float,
    reps: int = 10_000,
    seed: int = 0,
    convention: Convention = Convention.OFF_DIAGONAL,
    runner: Optional[ReplicateRunner] = None,
) -> float:
    """Multinomial bootstrap standard error of Φ̂^(λ), resampled like `bootstrap_se`."""
    lam = _check_lambda(lam)
    return _bootstrap(
        table,
        lambda counts: phi_power_value(counts, lam),
        reps,
        seed,
        convention,
        runner,
        label=f"phi^({lam:g}) bootstrap replicates",
    )

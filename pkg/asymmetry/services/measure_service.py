# asymmetry/services/measure_service.py
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from asymmetry.core.exceptions import ErrorCode, InputError
from asymmetry.schemas.measures import AsymmetryValue, MeasureKind, WeightKind, WeightMap, WeightScheme
from asymmetry.schemas.table import ProbTable, ZeroPairPolicy
from asymmetry.services.table_service import included_pairs

logger = logging.getLogger(__name__)

QUARTER_PI = math.pi / 4.0


def _check_array(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 2:
        raise InputError(f"Expected a square R×R array with R >= 2, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0):
        raise InputError("Table entries must be finite and nonnegative")
    if p.sum() - np.trace(p) <= 0.0:
        raise InputError("Table has no off-diagonal mass")
    return p


def raw_weights(p: np.ndarray, scheme: WeightScheme, mask: np.ndarray) -> np.ndarray:
    """
    Unnormalized pair weights on the included cells.

    Pair-proportional weights are p_ij + p_ji, so Φ stays invariant to
    rescaling of p; dividing by the sum gives the normalized weights.
    """
    if scheme.kind == WeightKind.UNIFORM:
        return mask.astype(np.float64)
    if scheme.kind == WeightKind.PAIR:
        return np.where(mask, p + p.T, 0.0)

    custom = np.array(scheme.custom, dtype=np.float64)
    if custom.shape != p.shape:
        raise InputError(
            f"Custom weights are {custom.shape[0]}x{custom.shape[0]} but the table is {p.shape[0]}x{p.shape[0]}",
            error_code=ErrorCode.INVALID_PARAMETER,
        )
    return np.where(mask, custom, 0.0)


def pair_arcs(p: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """
    Per-cell Fisher-Rao arc divided by π/4, in [0, 1].

    arctan(|√p_ij - √p_ji| / (√p_ij + √p_ji)) equals the arccos form of the
    arc and is exact at ties (0) and at one-sided pairs (π/4).
    """
    root = np.sqrt(p)
    spread = np.abs(root - root.T)
    scale = root + root.T
    ratio = np.divide(spread, scale, out=np.zeros_like(p), where=mask & (scale > 0.0))
    # one-sided pairs end exactly on the arc's endpoint
    return np.where(ratio == 1.0, 1.0, np.arctan(ratio) / QUARTER_PI)


def _weights_for(p: np.ndarray, scheme: WeightScheme, policy: ZeroPairPolicy) -> Tuple[np.ndarray, np.ndarray, int]:
    # Pair-proportional weights vanish on empty pairs, so those pairs drop out
    # without tripping the zero-pair policy.
    if scheme.kind == WeightKind.PAIR:
        mask, skipped = included_pairs(p, ZeroPairPolicy.SKIP)
    else:
        mask, skipped = included_pairs(p, policy)
    return mask, raw_weights(p, scheme, mask), skipped


def realize_weights(
    scheme: WeightScheme,
    probs: ProbTable,
    policy: ZeroPairPolicy = ZeroPairPolicy.ERROR,
) -> WeightMap:
    """
    Realizes a weight scheme on a probability table.

    Uniform weights are 1/(R(R-1)), or 1/(number of surviving cells) when
    pairs are skipped. Pair weights are (p_ij + p_ji) / (2 Σ_{s≠t} p_st).
    Custom weights are used as given, renormalized only over survivors.

    Args:
        scheme: Weight scheme
        probs: Probability table
        policy: Zero-pair policy for uniform and custom weights

    Returns:
        WeightMap summing to 1 over the off-diagonal cells
    """
    p = probs.as_array()
    _, weights, skipped = _weights_for(p, scheme, policy)
    total = weights.sum()
    return WeightMap(kind=scheme.kind, weights=weights / total, skipped_pairs=skipped)


def phi_value(
    p: np.ndarray,
    scheme: Optional[WeightScheme] = None,
    policy: ZeroPairPolicy = ZeroPairPolicy.ERROR,
) -> float:
    """
    Φ on a raw R×R array (counts or probabilities, any positive scale).

    Returns:
        Weighted mean of the per-pair arcs over π/4, clipped to [0, 1]
    """
    scheme = scheme or WeightScheme.uniform()
    p = _check_array(p)
    mask, weights, _ = _weights_for(p, scheme, policy)
    arcs = pair_arcs(p, mask)
    value = float(np.sum(weights * arcs) / np.sum(weights))
    return min(1.0, max(0.0, value))


def phi(
    probs: ProbTable,
    scheme: Optional[WeightScheme] = None,
    policy: ZeroPairPolicy = ZeroPairPolicy.ERROR,
) -> AsymmetryValue:
    """Fisher-Rao measure of asymmetry Φ of a probability table."""
    scheme = scheme or WeightScheme.uniform()
    p = probs.as_array()
    _, _, skipped = _weights_for(p, scheme, policy)
    value = phi_value(p, scheme, policy)
    logger.debug(f"phi[{scheme.kind.value}] = {value:.6f} (skipped pairs: {skipped})")
    return AsymmetryValue(
        value=value,
        measure=MeasureKind.PHI,
        weight=scheme.kind,
        convention=probs.convention,
        skipped_pairs=skipped,
    )


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam) or lam <= -1.0:
        raise InputError(
            f"lambda must be finite and greater than -1, got {lam!r}",
            error_code=ErrorCode.INVALID_PARAMETER,
            details={"lambda": lam},
        )
    return lam


def phi_power_value(p: np.ndarray, lam: float) -> float:
    """
    Power-divergence measure Φ^(λ) on a raw R×R array.

    With p* the off-diagonal part of p normalized to 1 and q* its
    symmetrization, Φ^(λ) = Σ p* [(p*/q*)^λ - 1] / (2^λ - 1), and the
    Kullback-Leibler limit divided by ln 2 at λ = 0.
    """
    lam = _check_lambda(lam)
    p = _check_array(p)
    off = p * (1.0 - np.eye(p.shape[0]))
    p_star = off / off.sum()
    q_star = (p_star + p_star.T) / 2.0

    support = p_star > 0.0
    ps = p_star[support]
    log_ratio = np.log(ps / q_star[support])
    if lam == 0.0:
        value = float(np.sum(ps * log_ratio) / math.log(2.0))
    else:
        value = float(np.sum(ps * np.expm1(lam * log_ratio)) / math.expm1(lam * math.log(2.0)))
    return min(1.0, max(0.0, value))


def phi_power(probs: ProbTable, lam: float) -> AsymmetryValue:
    value = phi_power_value(probs.as_array(), lam)
    logger.debug(f"phi^({lam}) = {value:.6f}")
    return AsymmetryValue(
        value=value,
        measure=MeasureKind.PHI_POWER,
        lam=float(lam),
        convention=probs.convention,
    )


def phi_cs_closed(delta: float) -> float:
    """
    Φ of a conditional symmetry table with upper/lower odds Δ.

    (4/π)·arccos((1 + √Δ)/√(2(1 + Δ))), evaluated in the equivalent
    arctan form; Φ(Δ) = Φ(1/Δ).
    """
    delta = float(delta)
    if math.isnan(delta) or delta < 0.0:
        raise InputError(f"Delta must be nonnegative, got {delta!r}", error_code=ErrorCode.INVALID_PARAMETER)
    if math.isinf(delta):
        return 1.0
    root = math.sqrt(delta)
    return min(1.0, math.atan(abs(1.0 - root) / (1.0 + root)) / QUARTER_PI)


def cs_delta_from_phi(value: float) -> float:
    """
    The Δ in [0, 1] whose conditional symmetry table has Φ = value.

    Reads an observed Φ̂ as the odds of an equivalent CS model.
    """
    value = float(value)
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InputError(f"Phi must be in [0, 1], got {value!r}", error_code=ErrorCode.INVALID_PARAMETER)
    if value == 0.0:
        return 1.0
    if value == 1.0:
        return 0.0
    k = math.tan(value * QUARTER_PI)
    root = (1.0 - k) / (1.0 + k)
    return root * root


def weight_spread(values: Sequence[float]) -> Optional[float]:
    """max - min of Φ̂ across weight schemes; None with fewer than two."""
    if len(values) < 2:
        return None
    return float(max(values) - min(values))

# asymmetry/services/geometry_service.py
import logging
from typing import Iterable, List, Tuple, Union

import numpy as np

from asymmetry.core.exceptions import ComputationError, ErrorCode, InputError
from asymmetry.schemas.geometry import CurveSample, ProbVector
from asymmetry.schemas.table import SYMMETRIC_POINT, PairPoint

logger = logging.getLogger(__name__)

# Cosine values beyond [-1, 1] by more than this point at a bug upstream.
COSINE_CLAMP_TOL = 1e-9

VectorLike = Union[ProbVector, PairPoint, np.ndarray, Iterable[float]]


def _as_vector(value: VectorLike) -> np.ndarray:
    if isinstance(value, (ProbVector, PairPoint)):
        return value.as_array()
    array = np.asarray(value, dtype=np.float64).ravel()
    if array.size == 0 or not np.all(np.isfinite(array)):
        raise InputError("Vectors must be non-empty and finite", error_code=ErrorCode.INVALID_PARAMETER)
    return array


def _embedding(value: VectorLike) -> np.ndarray:
    if isinstance(value, ProbVector):
        return value.sqrt_embedding()
    if isinstance(value, PairPoint):
        return value.embedding()
    array = _as_vector(value)
    if np.any(array < 0.0):
        raise InputError("Square-root embedding needs nonnegative vectors", error_code=ErrorCode.INVALID_PARAMETER)
    return np.sqrt(array)


def _matched(p: VectorLike, q: VectorLike) -> Tuple[np.ndarray, np.ndarray]:
    p_arr, q_arr = _as_vector(p), _as_vector(q)
    if p_arr.shape != q_arr.shape:
        raise InputError(
            f"Length mismatch: {p_arr.size} vs {q_arr.size}",
            error_code=ErrorCode.INVALID_PARAMETER,
            details={"left": p_arr.size, "right": q_arr.size},
        )
    return p_arr, q_arr


def euclidean(p: VectorLike, q: VectorLike) -> float:
    """ℓ2 distance between two probability vectors."""
    p_arr, q_arr = _matched(p, q)
    return float(np.linalg.norm(p_arr - q_arr))


def cosine_similarity(u: VectorLike, v: VectorLike) -> float:
    """
    Inner product over the product of ℓ2 norms, clamped to [-1, 1].

    Raises:
        InputError: zero vector or length mismatch
        ComputationError: rounding excess larger than COSINE_CLAMP_TOL
    """
    u_arr, v_arr = _matched(u, v)
    u_norm = np.linalg.norm(u_arr)
    v_norm = np.linalg.norm(v_arr)
    if u_norm == 0.0 or v_norm == 0.0:
        raise InputError("Cosine similarity of a zero vector is undefined", error_code=ErrorCode.INVALID_PARAMETER)

    cosine = float(np.dot(u_arr, v_arr) / (u_norm * v_norm))
    if abs(cosine) > 1.0 + COSINE_CLAMP_TOL:
        raise ComputationError(f"Cosine similarity {cosine!r} outside [-1, 1]", details={"cosine": cosine})
    return min(1.0, max(-1.0, cosine))


def fisher_rao_arc(p: VectorLike, q: VectorLike) -> float:
    """
    Arc between the square-root embeddings of p and q, in radians.

    Equal to arccos(cosine_similarity(√p, √q)). The half-chord form
    2·arcsin(|û − v̂| / 2) is used for the evaluation because arccos loses
    half the digits next to 1, and it gives exactly 0 for p = q.

    Args:
        p: Probability vector
        q: Probability vector of the same length

    Returns:
        Arc length in [0, π/2] for nonnegative vectors
    """
    _matched(p, q)
    u = _embedding(p)
    v = _embedding(q)
    # validates the zero-vector and clamp conditions
    cosine_similarity(u, v)

    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    half_chord = min(1.0, float(np.linalg.norm(u - v)) / 2.0)
    return float(2.0 * np.arcsin(half_chord))


def hellinger_vec(p: VectorLike, q: VectorLike) -> float:
    """Hellinger distance with the 1/√2 normalization, so the range is [0, 1]."""
    _matched(p, q)
    return float(np.linalg.norm(_embedding(p) - _embedding(q)) / np.sqrt(2.0))


def power_divergence(p: VectorLike, q: VectorLike, lam: float) -> float:
    """
    Cressie-Read power divergence of p from q.

        λ ∉ {0, -1}:  1/(λ(λ+1)) Σ p_i [(p_i/q_i)^λ - 1]
        λ = 0:        Σ p_i ln(p_i/q_i)
        λ = -1:       Σ q_i ln(q_i/p_i)

    The general branch is evaluated through expm1(λ·ln(p/q)) so that it
    approaches the λ = 0 branch smoothly.

    Args:
        p: Probability vector
        q: Reference vector, positive wherever p is
        lam: Finite power parameter

    Returns:
        Divergence (may be +inf for λ <= -1 when p has zeros q does not)
    """
    p_arr, q_arr = _matched(p, q)
    if not np.isfinite(lam):
        raise InputError(f"lambda must be finite, got {lam!r}", error_code=ErrorCode.INVALID_PARAMETER)
    if np.any(p_arr < 0.0) or np.any(q_arr < 0.0):
        raise InputError("Power divergence needs nonnegative vectors", error_code=ErrorCode.INVALID_PARAMETER)

    support = p_arr > 0.0
    violation = support & (q_arr == 0.0)
    if np.any(violation):
        index = int(np.argmax(violation))
        raise InputError(
            f"Support violation at entry {index + 1}: p > 0 where q = 0",
            error_code=ErrorCode.INVALID_PARAMETER,
            details={"index": index + 1},
        )

    if lam == -1.0:
        reference = q_arr > 0.0
        if np.any(reference & ~support):
            return float("inf")
        return float(np.sum(q_arr[reference] * np.log(q_arr[reference] / p_arr[reference])))

    ps = p_arr[support]
    log_ratio = np.log(ps / q_arr[support])
    if lam == 0.0:
        return float(np.sum(ps * log_ratio))

    if lam < -1.0 and np.any(~support & (q_arr > 0.0)):
        return float("inf")
    return float(np.sum(ps * np.expm1(lam * log_ratio)) / (lam * (lam + 1.0)))


def euclidean_pair(point: PairPoint, reference: PairPoint = SYMMETRIC_POINT) -> float:
    return euclidean(point, reference)


def fisher_rao_pair(point: PairPoint, reference: PairPoint = SYMMETRIC_POINT) -> float:
    return fisher_rao_arc(point, reference)


def hellinger_pair(point: PairPoint, reference: PairPoint = SYMMETRIC_POINT) -> float:
    return hellinger_vec(point, reference)


def constraint_curve(grid: Iterable[float]) -> List[CurveSample]:
    """
    Distances from the pair point (p^c, 1 - p^c) to s = (1/2, 1/2).

    Args:
        grid: p^c values in [0, 1]

    Returns:
        One CurveSample per grid value, in grid order
    """
    samples = []
    for position, pc in enumerate(grid):
        pc = float(pc)
        if not np.isfinite(pc) or not 0.0 <= pc <= 1.0:
            raise InputError(
                f"Grid value {pc!r} at position {position} is outside [0, 1]",
                error_code=ErrorCode.INVALID_PARAMETER,
                details={"position": position, "value": pc},
            )
        point = PairPoint(forward=pc, backward=1.0 - pc)
        samples.append(
            CurveSample(
                pc=pc,
                ed=euclidean_pair(point),
                frd=fisher_rao_pair(point),
                hd=hellinger_pair(point),
            )
        )
    logger.debug(f"Constraint curve sampled at {len(samples)} points")
    return samples


def unit_grid(step: float) -> np.ndarray:
    """Evenly spaced grid on [0, 1] whose spacing is `step` (1/step must be an integer)."""
    if not np.isfinite(step) or not 0.0 < step <= 1.0:
        raise InputError(f"Grid step must be in (0, 1], got {step!r}", error_code=ErrorCode.INVALID_PARAMETER)
    intervals = int(round(1.0 / step))
    if abs(intervals * step - 1.0) > 1e-9:
        raise InputError(f"Grid step {step!r} does not divide [0, 1] evenly", error_code=ErrorCode.INVALID_PARAMETER)
    return np.linspace(0.0, 1.0, intervals + 1)

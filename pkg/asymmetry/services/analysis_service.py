# asymmetry/services/analysis_service.py
import logging
from typing import List, Optional, Sequence

from asymmetry.schemas.document import AnalysisDocument, AnalysisOptions, InputDigest
from asymmetry.schemas.measures import MeasureReport, SeStatus, WeightKind, WeightScheme
from asymmetry.schemas.table import Convention, CountTable, ZeroPairPolicy
from asymmetry.services.inference_service import (
    bootstrap_power_se,
    bootstrap_se,
    bowker,
    phi_interval,
    phi_power_interval,
)
from asymmetry.services.measure_service import cs_delta_from_phi, weight_spread

logger = logging.getLogger(__name__)


def _warnings_for(report: MeasureReport) -> List[str]:
    name = f"phi[{report.weight.value}]" if report.lam is None else f"phi^({report.lam:g})"
    warnings = []
    if report.skipped_pairs:
        warnings.append(f"{name}: {report.skipped_pairs} empty cell pair(s) skipped")
    if report.se_status == SeStatus.BOUNDARY:
        warnings.append(f"{name}: SE not available (zero off-diagonal cell)")
    elif report.se_status == SeStatus.DEGENERATE:
        warnings.append(f"{name}: degenerate SE of 0 (all included pairs tied)")
    if report.ci_clipped:
        warnings.append(f"{name}: confidence interval clipped to [0, 1]")
    return warnings


def analyze_table(
    table: CountTable,
    source: str,
    sha256: str,
    weights: Sequence[WeightKind] = (WeightKind.UNIFORM, WeightKind.PAIR),
    lambdas: Sequence[float] = (-0.5, 0.0, 1.0),
    alpha: float = 0.05,
    convention: Convention = Convention.OFF_DIAGONAL,
    policy: ZeroPairPolicy = ZeroPairPolicy.ERROR,
    bootstrap_reps: Optional[int] = None,
    seed: Optional[int] = None,
) -> AnalysisDocument:
    """
    Builds the full analysis of one table.

    Φ with SE and CI for every weight scheme, Φ^(λ) for every λ, Bowker's
    test and the equivalent CS odds of each Φ̂. A bootstrap SE is added to
    every report when `bootstrap_reps` is set.

    Args:
        table: Count table
        source: Input file name as given
        sha256: Digest of the input bytes
        weights: Weight schemes for Φ
        lambdas: Power parameters for Φ^(λ)
        alpha: Confidence level complement
        convention: Normalization convention
        policy: Zero-pair policy
        bootstrap_reps: Bootstrap replicates (optional)
        seed: Base seed of the bootstrap

    Returns:
        AnalysisDocument
    """
    measures: List[MeasureReport] = []
    for kind in weights:
        scheme = WeightScheme(kind=kind)
        report = phi_interval(table, scheme, alpha, convention, policy)
        update = {"equivalent_delta": cs_delta_from_phi(report.estimate)}
        if bootstrap_reps:
            update["bootstrap_se"] = bootstrap_se(table, scheme, bootstrap_reps, seed or 0, convention)
        measures.append(report.model_copy(update=update))

    for lam in lambdas:
        report = phi_power_interval(table, lam, alpha, convention)
        if bootstrap_reps:
            report = report.model_copy(
                update={"bootstrap_se": bootstrap_power_se(table, lam, bootstrap_reps, seed or 0, convention)}
            )
        measures.append(report)

    warnings = [warning for report in measures for warning in _warnings_for(report)]
    symmetry_test = bowker(table)
    if symmetry_test.empty_pairs:
        warnings.append(f"bowker: {symmetry_test.empty_pairs} empty cell pair(s) excluded from df")

    document = AnalysisDocument(
        input=InputDigest(
            source=source,
            sha256=sha256,
            dim=table.dim,
            total=table.total,
            off_diagonal_total=table.off_diagonal_total,
            convention=convention,
            effective_n=table.effective_n(convention),
        ),
        options=AnalysisOptions(
            weights=list(weights),
            lambdas=[float(lam) for lam in lambdas],
            alpha=alpha,
            normalization=convention,
            zero_pair_policy=policy,
            bootstrap_reps=bootstrap_reps,
            seed=seed if bootstrap_reps else None,
        ),
        measures=measures,
        symmetry_test=symmetry_test,
        weight_spread=weight_spread([m.estimate for m in measures if m.lam is None]),
        warnings=warnings,
    )
    logger.info(f"Analyzed {source}: {len(measures)} measures, {len(warnings)} warning(s)")
    return document

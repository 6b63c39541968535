# asymmetry/commands/coverage.py
import argparse
import json
import time

from asymmetry.commands.options import finite_float, positive_int, seed_value
from asymmetry.config import get_settings
from asymmetry.reports.writers import emit
from asymmetry.schemas.measures import WeightKind, WeightScheme
from asymmetry.schemas.simulation import CsSpec
from asymmetry.services.simulation_service import coverage_experiment


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("coverage", help="Monte Carlo coverage of the phi confidence interval")
    parser.add_argument("--delta", type=finite_float, default=0.5)
    parser.add_argument("--dim", type=positive_int, default=3)
    parser.add_argument("--n", type=positive_int, default=5000)
    parser.add_argument("--reps", type=positive_int, default=2000)
    parser.add_argument("--alpha", type=finite_float, default=0.05)
    parser.add_argument("--seed", type=seed_value, default=None, help="Base seed (default ASYMM_DEFAULT_SEED)")
    parser.add_argument("--weight", choices=[WeightKind.UNIFORM.value, WeightKind.PAIR.value],
                        default=WeightKind.UNIFORM.value)
    parser.add_argument("--with-timing", action="store_true",
                        help="Add metadata.runtime_seconds (output is then not reproducible)")
    parser.add_argument("--out", default=None, help="JSON destination (default stdout)")
    parser.set_defaults(handler=run_coverage)


def run_coverage(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else get_settings().DEFAULT_SEED
    started = time.perf_counter()
    result = coverage_experiment(
        CsSpec.uniform(args.delta, args.dim),
        n=args.n,
        reps=args.reps,
        alpha=args.alpha,
        scheme=WeightScheme(kind=WeightKind(args.weight)),
        seed=seed,
    )

    payload = result.model_dump(mode="json")
    if args.with_timing:
        payload["metadata"] = {"runtime_seconds": round(time.perf_counter() - started, 3)}
    emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0

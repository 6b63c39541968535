# asymmetry/commands/analyze.py
import argparse
import logging

from asymmetry.commands.options import WEIGHT_CHOICES, finite_float, float_list, positive_int, seed_value
from asymmetry.config import get_settings
from asymmetry.reports.writers import analysis_csv, emit, to_json
from asymmetry.schemas.table import Convention, ZeroPairPolicy
from asymmetry.services.analysis_service import analyze_table
from asymmetry.services.table_service import read_table

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("analyze", help="Measure the asymmetry of a square contingency table")
    parser.add_argument("--input", required=True, help="CSV table (R lines of R integer counts)")
    parser.add_argument("--weight", choices=sorted(WEIGHT_CHOICES), default="both", help="Weight scheme(s) for phi")
    parser.add_argument("--lambda", dest="lambdas", type=float_list, default=float_list("-0.5,0,1"),
                        help="Comma separated lambdas for phi^(lambda) (default -0.5,0,1)")
    parser.add_argument("--alpha", type=finite_float, default=0.05, help="1 - confidence level (default 0.05)")
    parser.add_argument("--normalization", choices=[c.value for c in Convention], default=Convention.OFF_DIAGONAL.value)
    parser.add_argument("--zero-pair-policy", choices=[p.value for p in ZeroPairPolicy],
                        default=ZeroPairPolicy.ERROR.value)
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--bootstrap", type=positive_int, default=None, metavar="REPS",
                        help="Add a multinomial bootstrap SE with this many replicates")
    parser.add_argument("--seed", type=seed_value, default=None, help="Base seed of the bootstrap")
    parser.add_argument("--out", default=None, help="Write the document here instead of stdout")
    parser.set_defaults(handler=run_analyze)


def run_analyze(args: argparse.Namespace) -> int:
    table, digest = read_table(args.input)
    seed = args.seed if args.seed is not None else get_settings().DEFAULT_SEED
    document = analyze_table(
        table,
        source=args.input,
        sha256=digest,
        weights=WEIGHT_CHOICES[args.weight],
        lambdas=args.lambdas,
        alpha=args.alpha,
        convention=Convention(args.normalization),
        policy=ZeroPairPolicy(args.zero_pair_policy),
        bootstrap_reps=args.bootstrap,
        seed=seed,
    )
    for warning in document.warnings:
        logger.warning(warning)

    text = to_json(document) if args.format == "json" else analysis_csv(document)
    emit(text, args.out)
    return 0

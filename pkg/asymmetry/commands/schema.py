# asymmetry/commands/schema.py
import argparse
import json

from asymmetry.reports.writers import emit
from asymmetry.schemas.document import AnalysisDocument


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("schema", help="Print the JSON schema of the analyze document")
    parser.add_argument("--out", default=None)
    parser.set_defaults(handler=run_schema)


def run_schema(args: argparse.Namespace) -> int:
    emit(json.dumps(AnalysisDocument.model_json_schema(), indent=2) + "\n", args.out)
    return 0

# asymmetry/cli.py
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from asymmetry.commands import COMMANDS
from asymmetry.config import get_settings
from asymmetry.core.exceptions import AsymmetryError, ErrorCode, InputError
from asymmetry.core.logging_setup import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTATION = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymmetry",
        description="Fisher-Rao measure of asymmetry for square contingency tables",
    )
    parser.add_argument("--log-level", default=None, help="Overrides ASYMM_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def _from_validation_error(exc: ValidationError) -> InputError:
    errors = exc.errors(include_url=False)
    first = errors[0] if errors else {}
    location = ".".join(str(part) for part in first.get("loc", ()))
    return InputError(
        f"Invalid value for {location or 'input'}: {first.get('msg', str(exc))}",
        error_code=ErrorCode.INVALID_PARAMETER,
        details={"location": location, "errors": len(errors)},
    )


def _debug_enabled() -> bool:
    # settings themselves may be the invalid input being reported
    try:
        return get_settings().DEBUG
    except ValidationError:
        return False


def handle_error(exc: BaseException) -> int:
    """
    Single error handler of the CLI.

    Known errors are logged with their code and details, reported on stderr
    as one line and mapped to their exit code; anything else exits with 3.
    """
    if isinstance(exc, ValidationError):
        exc = _from_validation_error(exc)

    if isinstance(exc, AsymmetryError):
        logger.error(f"Known exception: {exc.error_code.value} - {exc.message}", extra={"error": exc.to_dict()})
        if _debug_enabled():
            logger.exception("Traceback", exc_info=exc)
        print(f"error: {exc.message}", file=sys.stderr)
        if exc.user_message:
            print(f"hint: {exc.user_message}", file=sys.stderr)
        return exc.exit_code

    logger.error(f"Unexpected error: {exc}", exc_info=exc)
    print(f"error: unexpected failure: {exc}", file=sys.stderr)
    return EXIT_COMPUTATION


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else EXIT_OK

    try:
        configure_logging(args.log_level)
        return args.handler(args)
    except Exception as e:
        return handle_error(e)


if __name__ == "__main__":
    sys.exit(main())

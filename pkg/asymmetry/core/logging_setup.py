# asymmetry/core/logging_setup.py
import logging
import sys
from typing import Optional

from asymmetry.config import get_settings
from asymmetry.core.exceptions import ErrorCode, InputError

_configured = False


def configure_logging(level: Optional[str] = None) -> None:
    """
    Configures root logging for a CLI process.

    Logs go to stderr; stdout is reserved for the command's artifact.

    Args:
        level: Level name overriding ASYMM_LOG_LEVEL (optional)

    Raises:
        InputError: unknown level name
    """
    global _configured
    settings = get_settings()
    resolved = (level or settings.LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(resolved), int):
        raise InputError(f"Unknown log level {resolved!r}", error_code=ErrorCode.INVALID_PARAMETER)
    if _configured:
        logging.getLogger().setLevel(resolved)
        return

    logging.basicConfig(level=resolved, format=settings.LOG_FORMAT, stream=sys.stderr)
    _configured = True

import logging
import os
import sys
import typing as T

LEVEL_VARIABLE = "GAPCERT_LOGGER_LEVEL"
LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"


def level_from_env(value: T.Optional[str] = None) -> int:
    """Numeric level for ``value``, read from ``$GAPCERT_LOGGER_LEVEL`` when
    omitted. Names are case-insensitive; unset or unknown values give INFO."""
    if value is None:
        value = os.environ.get(LEVEL_VARIABLE, "")
    value = value.strip().upper()
    if value.isdigit():
        return int(value)
    level = logging.getLevelName(value)
    return level if isinstance(level, int) else logging.INFO


# reports go to stdout, so log records go to stderr
logger = logging.getLogger("gapcert")
if not logger.handlers:
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(_handler)
logger.setLevel(level_from_env())

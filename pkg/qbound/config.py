"""Configuration for qbound.

Settings come from environment variables with built-in defaults. Sweep
parameters may also be read from a flat key=value file; command-line flags always
take precedence over file values, which take precedence over defaults.
"""

import logging
import os
import sys
from pathlib import Path

from qbound.exceptions import ConfigError

# Logging configuration
# Valid values: DEBUG, INFO, WARNING, ERROR, CRITICAL
LOG_LEVEL_STR = os.environ.get("QBOUND_LOG_LEVEL", "WARNING").upper()
LOG_LEVEL = getattr(logging, LOG_LEVEL_STR, logging.WARNING)

# Optional log file; unset means stderr only
LOG_FILE = os.environ.get("QBOUND_LOG_FILE") or None

# Default seed for the verify command and the accessible-information search
DEFAULT_SEED = int(os.environ.get("QBOUND_SEED", "42"))

# Local refinement steps of the accessible-information search
SEARCH_ITERATIONS = int(os.environ.get("QBOUND_SEARCH_ITERATIONS", "400"))

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Keys accepted in a sweep config file
CONFIG_KEYS = frozenset(
    {"scheme", "theta", "gamma", "pe", "n", "var", "range", "format", "out", "jobs"}
)


def setup_logging(level: int | None = None) -> logging.Logger:
    """Configure logging for the qbound package.

    Log records go to stderr (and optionally to QBOUND_LOG_FILE) so that
    command output on stdout is never interleaved with diagnostics.

    Args:
        level: Override for the configured log level.

    Returns:
        The qbound package logger.
    """
    effective = LOG_LEVEL if level is None else level
    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT)

    logger = logging.getLogger("qbound")
    logger.setLevel(effective)

    # Avoid duplicate handlers if setup is called multiple times
    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(effective)
        return logger

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(effective)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if LOG_FILE:
        try:
            file_handler = logging.FileHandler(LOG_FILE, encoding="utf-8")
            file_handler.setLevel(effective)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except (OSError, PermissionError) as e:
            logger.warning("Could not set up file logging to %s: %s", LOG_FILE, e)

    logger.propagate = False

    return logger


def load_config_file(path: str | Path) -> dict[str, str]:
    """Load a flat ``key=value`` sweep configuration file.

    One setting per line, e.g.::

        # n sweep at fixed gamma
        scheme=bb84
        var=n
        range=3:9:4

    Blank lines and lines starting with ``#`` are skipped. Each line is split
    on its first ``=``; values stay strings and are converted by the caller.

    Args:
        path: Path to the config file.

    Returns:
        Mapping of recognized keys to their raw string values.

    Raises:
        ConfigError: If the file is unreadable, a line is not ``key=value``,
            a value is empty, or a key is unknown or repeated.
    """
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("Cannot read config file", path=str(config_path), detail=str(e)) from e

    result: dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(
                f"Line {number} is not 'key=value'",
                path=str(config_path),
                detail=stripped,
            )
        if key not in CONFIG_KEYS:
            raise ConfigError(
                f"Unknown config key: {key}",
                path=str(config_path),
                detail=f"allowed: {', '.join(sorted(CONFIG_KEYS))}",
            )
        if key in result:
            raise ConfigError(f"Duplicate config key: {key}", path=str(config_path), detail=stripped)
        if not value:
            raise ConfigError(f"Line {number} has no value for '{key}'", path=str(config_path))
        result[key] = value
    return result

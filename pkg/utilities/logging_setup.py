"""Centralized logging configuration for the project."""

from __future__ import annotations

import logging
import os
import sys
from logging.handlers import RotatingFileHandler

# Internal flag to avoid reconfiguring the root logger multiple times
_ROOT_CONFIGURED = False

_MAX_BYTES = 5 * 1024 * 1024
_BACKUPS = 5


def setup_logging(
    name: str, level: int = logging.DEBUG, log_dir: str = "logs", console: bool = False
) -> logging.Logger:
    """Configure logging for the given logger name.

    The root logger gets a rotating ``<log_dir>/main.log`` on first use; the named
    logger gets its own rotating ``<log_dir>/<name>.log`` and does not propagate.
    Library loggers below it (``DPMixtures.Sampler``, ``DPMixtures.Tails``, ...)
    inherit its handlers.

    Parameters
    ----------
    name:
        Name of the logger to configure, normally ``"DPMixtures"``.
    level:
        Logging level for both the root and child loggers.
    log_dir:
        Directory for the log files.
    console:
        Also echo records at INFO and above to stderr.
    """

    global _ROOT_CONFIGURED

    os.makedirs(log_dir, exist_ok=True)

    root_logger = logging.getLogger()
    if not _ROOT_CONFIGURED:
        root_logger.setLevel(level)
        for handler in root_logger.handlers[:]:
            root_logger.removeHandler(handler)

        root_handler = RotatingFileHandler(os.path.join(log_dir, "main.log"), maxBytes=_MAX_BYTES, backupCount=_BACKUPS)
        root_handler.setLevel(level)
        root_handler.setFormatter(logging.Formatter("%(asctime)s [%(name)s] %(levelname)s %(message)s"))
        root_logger.addHandler(root_handler)
        _ROOT_CONFIGURED = True

    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not logger.handlers:
        handler = RotatingFileHandler(os.path.join(log_dir, f"{name}.log"), maxBytes=_MAX_BYTES, backupCount=_BACKUPS)
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter("%(asctime)s [%(name)s] %(levelname)s %(message)s"))
        logger.addHandler(handler)
        logger.propagate = False

    if console and not any(getattr(h, "_dpm_console", False) for h in logger.handlers):
        stream = logging.StreamHandler(sys.stderr)
        stream.setLevel(logging.INFO)
        stream.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        stream._dpm_console = True  # type: ignore[attr-defined]
        logger.addHandler(stream)

    # numerical libraries stay quiet below warnings
    logging.getLogger("asyncio").setLevel(logging.WARNING)

    return logger


__all__ = ["setup_logging"]

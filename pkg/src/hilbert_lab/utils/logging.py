"""Logging utilities for the Hilbert geometry laboratory."""

import json
import logging
import logging.handlers
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from hilbert_lab.config.base import LogConfig

ROOT_LOGGER = "hilbert_lab"


class JsonFormatter(logging.Formatter):
    """JSON formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format the record as JSON."""
        data = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            data["exception"] = self.formatException(record.exc_info)

        if getattr(record, "run_id", None) is not None:
            data["run_id"] = record.run_id
        if getattr(record, "seed", None) is not None:
            data["seed"] = record.seed

        return json.dumps(data)


class RunIdFilter(logging.Filter):
    """Filter that adds the run identifier and seed to log records."""

    def __init__(self, run_id: Optional[str] = None, seed: Optional[int] = None):
        super().__init__()
        self.run_id = run_id
        self.seed = seed

    def filter(self, record: logging.LogRecord) -> bool:
        """Add run ID and seed to the record."""
        record.run_id = self.run_id
        record.seed = self.seed
        return True


def _log_file_handler(config: LogConfig) -> logging.Handler:
    """Handler for ``config.file_path``, rotated when ``rotate_logs`` is set."""
    path = Path(config.file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if config.rotate_logs:
        return logging.handlers.RotatingFileHandler(path, maxBytes=config.max_bytes, backupCount=config.backup_count)
    return logging.FileHandler(path)


def setup_logging(config: LogConfig, name: str = ROOT_LOGGER) -> logging.Logger:
    """Configure the laboratory's root logger.

    Records go to standard error, and to a log file when one is configured;
    standard output is reserved for command results. Calling it again
    replaces the handlers of an earlier run.

    Parameters
    ----------
    config : LogConfig
        Level, format, JSON switch and optional log file.
    name : str
        Logger to configure, the package root by default.

    Returns
    -------
    logging.Logger
        The configured logger.

    """
    logger = logging.getLogger(name)
    logger.setLevel(config.level)
    logger.handlers.clear()

    formatter = JsonFormatter() if config.enable_json_logging else logging.Formatter(config.format)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.file_path:
        handlers.append(_log_file_handler(config))
    for handler in handlers:
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger


def get_logger(name: str) -> logging.Logger:
    """Module logger under the package root, e.g. ``get_logger("entropy.volume")``."""
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


class ExperimentLogger:
    """Context manager for experiment logging.

    Attaches a ``RunIdFilter`` to the handlers of the root laboratory logger
    so that every record emitted during the experiment, from any module,
    carries the run identifier and seed.
    """

    def __init__(
        self,
        logger: logging.Logger,
        command: str,
        run_id: Optional[str] = None,
        seed: Optional[int] = None,
    ):
        self.logger = logger
        self.command = command
        self.run_id = run_id
        self.seed = seed
        self.filter = RunIdFilter(run_id, seed)

    def __enter__(self) -> logging.Logger:
        """Add run ID filter."""
        for handler in self.logger.handlers:
            handler.addFilter(self.filter)
        self.logger.info(f"Starting {self.command} (run {self.run_id}, seed {self.seed})")
        return self.logger

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Remove run ID filter and log any exceptions."""
        if exc_type:
            self.logger.error(
                f"Error in {self.command}",
                exc_info=(exc_type, exc_val, exc_tb),
            )
        else:
            self.logger.info(f"Completed {self.command}")

        for handler in self.logger.handlers:
            handler.removeFilter(self.filter)

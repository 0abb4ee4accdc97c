"""Logging for simplehom: colored console lines on stderr, JSON lines in an optional log file."""

import functools
import json
import logging
import logging.handlers
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from types import TracebackType
from typing import Any, Callable, Dict, Optional, Type

from .config import LoggingConfig, Settings


# attributes every LogRecord carries; anything else arrived through extra= or LoggingContext
_RECORD_ATTRS = frozenset(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {"message", "asctime"}

# held at WARNING regardless of the configured level
_QUIET_LOGGERS = ("sympy", "numpy")


def record_fields(record: logging.LogRecord) -> Dict[str, Any]:
    """Context fields attached to a record."""
    return {k: v for k, v in vars(record).items() if k not in _RECORD_ATTRS}


class StructuredFormatter(logging.Formatter):
    """One JSON object per record; context fields are merged at the top level."""

    def format(self, record: logging.LogRecord) -> str:
        data: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "where": f"{record.module}:{record.funcName}:{record.lineno}",
        }
        data.update(record_fields(record))
        if record.exc_info:
            data["exception"] = self.formatException(record.exc_info)
        return json.dumps(data, default=str, ensure_ascii=False)


class ColoredFormatter(logging.Formatter):
    """Console formatter coloring by level and tagging the running check."""

    COLORS = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[35m",
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        check = getattr(record, "check", None)
        if check is not None:
            line = f"[{check}] {line}"
        color = self.COLORS.get(record.levelname)
        return f"{color}{line}{self.RESET}" if color else line


def setup_logging(config: Optional[LoggingConfig] = None, settings: Optional[Settings] = None) -> None:
    """
    Configure the root logger.

    Console output goes to stderr; stdout carries reports only.
    """
    if settings is not None:
        config = settings.logging
    config = config or LoggingConfig()

    root = logging.getLogger()
    root.setLevel(config.level.upper())
    root.handlers.clear()

    if config.console_output:
        console = logging.StreamHandler(sys.stderr)
        formatter_cls = ColoredFormatter if sys.stderr.isatty() else logging.Formatter
        console.setFormatter(formatter_cls(config.format))
        root.addHandler(console)

    if config.file_path:
        log_file = Path(config.file_path)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=config.max_file_size,
            backupCount=config.backup_count,
            encoding="utf-8",
        )
        file_handler.setFormatter(StructuredFormatter())
        root.addHandler(file_handler)

    for name in _QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


class LoggingContext:
    """
    Attach fields to every record created inside the block.

    Field names must not clash with ``extra=`` keys used by the library
    (``p``, ``k``, ``level``, ...), or ``Logger.makeRecord`` refuses the record.
    """

    def __init__(self, logger: logging.Logger, **fields: Any):
        self.logger = logger
        self.fields = fields
        self._previous: Optional[Callable[..., logging.LogRecord]] = None

    def __enter__(self) -> "LoggingContext":
        previous = self._previous = logging.getLogRecordFactory()
        fields = self.fields

        def factory(*args: Any, **kwargs: Any) -> logging.LogRecord:
            record = previous(*args, **kwargs)
            record.__dict__.update(fields)
            return record

        logging.setLogRecordFactory(factory)
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc_val: Optional[BaseException],
        exc_tb: Optional[TracebackType],
    ) -> None:
        if self._previous is not None:
            logging.setLogRecordFactory(self._previous)


def log_function_call(func: Callable) -> Callable:
    """Log scalar arguments on entry and the elapsed time on exit of a long computation."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        logger = get_logger(func.__module__)
        scalars = {k: v for k, v in kwargs.items() if isinstance(v, (int, float, str))}
        logger.debug(f"Starting {func.__name__}", extra={"call_args": scalars})
        start = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"{func.__name__} failed after {time.perf_counter() - start:.2f}s: {e}")
            raise
        logger.debug(
            f"{func.__name__} finished", extra={"elapsed": round(time.perf_counter() - start, 3)}
        )
        return result

    return wrapper

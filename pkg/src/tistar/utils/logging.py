"""
Logging for tistar.

Console records go through Rich on stderr so that tables and reports on
stdout stay clean. An optional rotating file receives everything at DEBUG.
Timings of the heavy kernels are written to the ``performance`` logger.
"""

import logging
import logging.handlers
import time
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Optional

from rich.console import Console
from rich.logging import RichHandler

DEFAULT_FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE_BYTES = 10 * 1024 * 1024

console = Console(stderr=True)

_configured = False


def setup_logging(
    verbose: bool = False,
    log_file: Optional[str] = None,
    level: Optional[str] = None,
    fmt: str = DEFAULT_FILE_FORMAT,
    backup_count: int = 3,
) -> None:
    """
    Install the console handler and, if ``log_file`` is set, a rotating file.

    ``fmt`` and ``backup_count`` apply to the file handler only. Later calls
    are ignored once logging has been configured.
    """
    global _configured
    if _configured:
        return

    log_level = getattr(logging, (level or "INFO").upper(), logging.INFO)
    if verbose:
        log_level = logging.DEBUG
    root = logging.getLogger()
    root.setLevel(log_level)
    for handler in root.handlers[:]:
        root.removeHandler(handler)

    rich_handler = RichHandler(
        console=console,
        show_time=False,
        show_path=verbose,
        markup=False,
        rich_tracebacks=True,
    )
    rich_handler.setLevel(log_level)
    console_format = "%(name)s: %(message)s" if verbose else "%(message)s"
    rich_handler.setFormatter(logging.Formatter(console_format))
    root.addHandler(rich_handler)

    if log_file:
        path = Path(log_file).expanduser()
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                path,
                maxBytes=LOG_FILE_BYTES,
                backupCount=backup_count,
                encoding="utf-8",
            )
        except OSError as e:
            console.print(f"[yellow]Warning: cannot log to {path}: {e}[/yellow]")
        else:
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(fmt))
            root.addHandler(file_handler)

    for name in ("concurrent.futures", "hypothesis"):
        logging.getLogger(name).setLevel(logging.WARNING)

    _configured = True


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def _context(values: dict[str, Any]) -> str:
    return " ".join(f"{k}={v}" for k, v in values.items())


def log_performance(operation: str, duration: float, **context: Any) -> None:
    """Record how long ``operation`` took on the ``performance`` logger."""
    message = f"{operation} took {duration:.3f}s {_context(context)}"
    get_logger("performance").info(message.rstrip())


@contextmanager
def timed(operation: str, **context: Any) -> Iterator[None]:
    """Time the enclosed block with :func:`log_performance`."""
    start = time.perf_counter()
    try:
        yield
    finally:
        log_performance(operation, time.perf_counter() - start, **context)


def log_error_with_context(
    logger: logging.Logger, error: Exception, context: dict[str, Any]
) -> None:
    """Log an unexpected error with its traceback and the inputs that led to it."""
    logger.error(
        f"{type(error).__name__}: {error} | {_context(context)}", exc_info=error
    )


class LoggerMixin:
    """Per-class logger with ``key=value`` context on each record."""

    @property
    def logger(self) -> logging.Logger:
        cls = type(self)
        return get_logger(f"{cls.__module__}.{cls.__name__}")

    def _with_context(self, message: str, context: dict[str, Any]) -> str:
        return f"{message} | {_context(context)}" if context else message

    def log_info(self, message: str, **context: Any) -> None:
        self.logger.info(self._with_context(message, context))

    def log_warning(self, message: str, **context: Any) -> None:
        self.logger.warning(self._with_context(message, context))

    def log_error(
        self, message: str, error: Optional[Exception] = None, **context: Any
    ) -> None:
        self.logger.error(self._with_context(message, context), exc_info=error)

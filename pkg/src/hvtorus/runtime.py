"""
Compute Context

Thread-safe singleton holding process-wide compute settings and the worker pool
used to run independent sweep points, with automatic cleanup.
"""

import atexit
import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

MAX_WORKERS_ENV = "HVTORUS_MAX_WORKERS"
LOG_LEVEL_ENV = "HVTORUS_LOG_LEVEL"

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _read_max_workers() -> int:
    raw = os.environ.get(MAX_WORKERS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{MAX_WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{MAX_WORKERS_ENV} must be a positive integer, got {raw!r}")
    return value


def _read_log_level() -> str:
    raw = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
    if raw not in _LEVELS:
        raise ValueError(f"{LOG_LEVEL_ENV} must be one of {', '.join(_LEVELS)}, got {raw!r}")
    return raw


class ComputeContext:
    """
    Singleton compute context.

    Configured via environment variables:
    - HVTORUS_MAX_WORKERS: worker threads for sweeps (default 1, i.e. run inline)
    - HVTORUS_LOG_LEVEL: level name for the CLI log handler (default WARNING)

    Example:
        ctx = ComputeContext()
        tables = ctx.map_ordered(build_table, [4, 8, 12, 16])
    """

    _instance: Optional["ComputeContext"] = None
    _lock = threading.Lock()

    _executor: Optional[ThreadPoolExecutor] = None
    max_workers: int = 1
    log_level: str = "WARNING"
    _configured: bool = False

    def __new__(cls) -> "ComputeContext":
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self) -> None:
        if not self._configured:
            self._load_settings()

    def _load_settings(self) -> None:
        self.max_workers = _read_max_workers()
        self.log_level = _read_log_level()
        self._configured = True
        logger.debug("compute context: %d workers, log level %s", self.max_workers, self.log_level)

    @property
    def executor(self) -> ThreadPoolExecutor:
        """The shared thread pool, created on first use."""
        if self._executor is None:
            with self._lock:
                if self._executor is None:
                    self._executor = ThreadPoolExecutor(
                        max_workers=self.max_workers, thread_name_prefix="hvtorus"
                    )
                    atexit.register(self.close)
        return self._executor

    def map_ordered(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """
        Apply ``fn`` to every item, returning results in input order.

        With one worker the calls run inline on the calling thread.
        """
        items = list(items)
        if self.max_workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        return list(self.executor.map(fn, items))

    def close(self) -> None:
        """Shut down the worker pool if present."""
        if self._executor is not None:
            try:
                self._executor.shutdown(wait=True)
            finally:
                self._executor = None

    @classmethod
    def reset(cls) -> None:
        """Drop the singleton so the next access re-reads the environment."""
        with cls._lock:
            if cls._instance is not None:
                cls._instance.close()
                cls._instance._configured = False
            cls._instance = None


def get_context() -> ComputeContext:
    """
    Get the singleton ComputeContext instance.

    Returns:
        ComputeContext singleton
    """
    return ComputeContext()


def configure(max_workers: Optional[int] = None, log_level: Optional[str] = None) -> ComputeContext:
    """
    Set compute settings through the environment and rebuild the context.

    Args:
        max_workers: Worker threads for sweeps
        log_level: Logging level name

    Returns:
        The freshly configured ComputeContext
    """
    if max_workers is not None:
        os.environ[MAX_WORKERS_ENV] = str(max_workers)
    if log_level is not None:
        os.environ[LOG_LEVEL_ENV] = log_level
    ComputeContext.reset()
    return get_context()


def configure_logging(verbose: bool = False) -> logging.Handler:
    """Install one stderr handler on the package logger at the context's level."""
    level = "DEBUG" if verbose else get_context().log_level
    package_logger = logging.getLogger("hvtorus")
    for handler in list(package_logger.handlers):
        if getattr(handler, "_hvtorus_cli", False):
            package_logger.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    handler._hvtorus_cli = True  # type: ignore[attr-defined]
    package_logger.addHandler(handler)
    package_logger.setLevel(level)
    return handler

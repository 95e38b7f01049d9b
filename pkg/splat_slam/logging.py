# ---
# entity_id: module-splat-logging
# entity_name: SLAM Logging System
# entity_type_id: module
# entity_path: splat_slam/logging.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T09:00:00Z
# entity_exports: [LogLevel, setup_logging, get_logger, frame_context]
# entity_dependencies: [structlog]
# entity_callers: [slam, gaussians, evaluation, cli]
# entity_callees: []
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""
Structured logging for the SLAM pipeline.

Provides:
- Coloured console output on stderr
- JSON-lines file logging for machine parsing (everything from DEBUG up)
- Per-frame context propagation (frame index, timestamp)

Log Levels:
- DEBUG: per-iteration and per-frame details
- INFO: keyframes, insertion/pruning, mapping summaries
- WARNING: divergence fallbacks, degenerate covisibility
- ERROR: failures that stop a run
"""

import logging
import sys
from collections.abc import Generator
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any

import structlog


class LogLevel(str, Enum):
    """Log levels accepted by setup_logging."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


_ROOT = "splat_slam"

_SHARED_PROCESSORS: list[Any] = [
    structlog.contextvars.merge_contextvars,
    structlog.stdlib.add_logger_name,
    structlog.stdlib.add_log_level,
    structlog.processors.TimeStamper(fmt="iso", utc=True),
]


def setup_logging(
    level: LogLevel = LogLevel.INFO,
    log_file: Path | None = None,
    json_console: bool = False,
) -> None:
    """Configure structlog on top of stdlib logging.

    Args:
        level: Console level.
        log_file: Optional JSON-lines file receiving every event.
        json_console: Render console events as JSON instead of colour text.
    """
    structlog.configure(
        processors=[
            *_SHARED_PROCESSORS,
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )

    logger = logging.getLogger(_ROOT)
    logger.handlers.clear()
    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    console_renderer: Any = (
        structlog.processors.JSONRenderer()
        if json_console
        else structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty())
    )
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, level.value))
    console_handler.setFormatter(
        structlog.stdlib.ProcessorFormatter(
            processor=console_renderer,
            foreign_pre_chain=_SHARED_PROCESSORS,
        )
    )
    logger.addHandler(console_handler)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)  # Log everything to file
        file_handler.setFormatter(
            structlog.stdlib.ProcessorFormatter(
                processor=structlog.processors.JSONRenderer(),
                foreign_pre_chain=_SHARED_PROCESSORS,
            )
        )
        logger.addHandler(file_handler)


def get_logger(name: str = "") -> Any:
    """Get a structlog logger under the package namespace."""
    qualified = f"{_ROOT}.{name}" if name and not name.startswith(_ROOT) else (name or _ROOT)
    return structlog.get_logger(qualified)


@contextmanager
def frame_context(index: int, timestamp: float) -> Generator[None, None, None]:
    """Bind frame fields to every event logged inside the block."""
    with structlog.contextvars.bound_contextvars(frame=index, timestamp=round(timestamp, 6)):
        yield

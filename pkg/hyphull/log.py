"""Structured logging setup.

Library modules log through ``structlog.get_logger(__name__)``. Importing ``hyphull`` routes
those events into the standard ``logging`` module, so the host application owns the
handlers and stdout stays free for CSV output. The command line adds a stderr handler with
``configure_logging``.
"""

from __future__ import annotations

import logging
import os
import sys

import structlog


def configure_structlog(log_format: str | None = None) -> None:
    """Install the processor chain; ``log_format`` is ``json`` or ``console``."""
    fmt = (log_format or os.getenv("HYPHULL_LOG_FORMAT", "json")).lower()
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            (
                structlog.dev.ConsoleRenderer()
                if fmt == "console"
                else structlog.processors.JSONRenderer()
            ),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


def configure_logging(level: str, log_format: str) -> None:
    """Write records at ``level`` and above to stderr, one rendered event per line."""
    logging.basicConfig(
        stream=sys.stderr,
        format="%(message)s",
        level=getattr(logging, level.upper(), logging.WARNING),
    )
    configure_structlog(log_format)


__all__ = ["configure_logging", "configure_structlog"]

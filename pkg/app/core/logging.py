"""
Structured logging configuration.

JSON lines for production / batch runs, coloured console output for
development. Run context (command, variant, seed) is tracked in context
variables and attached to every record.
"""

import json
import logging
import sys
from contextvars import ContextVar
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

from app.core.config import Settings, get_settings


# Context variables for run tracking
run_id_var: ContextVar[Optional[str]] = ContextVar("run_id", default=None)
variant_var: ContextVar[Optional[str]] = ContextVar("variant", default=None)

# Attributes every LogRecord has; anything else came in through `extra=`.
_RESERVED_ATTRS = set(
    logging.LogRecord("", 0, "", 0, "", (), None).__dict__.keys()
) | {"message", "asctime"}


def _extra_fields(record: logging.LogRecord) -> Dict[str, Any]:
    return {
        key: value
        for key, value in record.__dict__.items()
        if key not in _RESERVED_ATTRS and not key.startswith("_")
    }


class StructuredFormatter(logging.Formatter):
    """JSON formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        run_id = run_id_var.get()
        if run_id:
            log_data["run_id"] = run_id

        variant = variant_var.get()
        if variant:
            log_data["variant"] = variant

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        log_data.update(_extra_fields(record))

        return json.dumps(log_data, default=str)


class ColoredConsoleFormatter(logging.Formatter):
    """Colored console formatter for development."""

    COLORS = {
        "DEBUG": "\033[36m",      # Cyan
        "INFO": "\033[32m",       # Green
        "WARNING": "\033[33m",    # Yellow
        "ERROR": "\033[31m",      # Red
        "CRITICAL": "\033[35m",   # Magenta
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        """Format with colors for console."""
        levelname = record.levelname
        color = self.COLORS.get(levelname, "")

        timestamp = datetime.fromtimestamp(record.created).strftime("%H:%M:%S")

        message = (
            f"{color}[{timestamp}] {levelname:8}{self.RESET} "
            f"{record.name:20} {record.getMessage()}"
        )

        variant = variant_var.get()
        if variant:
            message += f" [{variant}]"

        if record.exc_info:
            message += "\n" + self.formatException(record.exc_info)

        return message


def setup_logging(settings: Optional[Settings] = None):
    """Configure logging for the application."""
    settings = settings or get_settings()
    level = logging.DEBUG if settings.debug else getattr(logging, settings.log_level)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)

    if settings.use_json_logs:
        console_handler.setFormatter(StructuredFormatter())
    else:
        console_handler.setFormatter(ColoredConsoleFormatter())

    root_logger.addHandler(console_handler)

    # Silence noisy libraries
    logging.getLogger("hypothesis").setLevel(logging.WARNING)

    app_logger = logging.getLogger("app")
    app_logger.setLevel(level)

    app_logger.debug(
        "Logging configured",
        extra={
            "environment": settings.app_env,
            "log_format": settings.log_format,
        },
    )


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance."""
    return logging.getLogger(f"app.{name}")


# Custom log functions with context

def log_update(step: int, update_index: int, losses: Dict[str, float], **kwargs):
    """Log one PPO update with every loss term."""
    logger = get_logger("trainer")

    logger.info(
        f"Update {update_index} at step {step}: "
        f"l_total={losses.get('l_total', float('nan')):.4f}",
        extra={
            "step": step,
            "update": update_index,
            **losses,
            **kwargs,
        },
    )


def log_episode_batch(step: int, finished: int, successes: int, sr_recent: Optional[float]):
    """Log the episodes that finished during one rollout."""
    logger = get_logger("trainer")
    recent = "n/a" if sr_recent is None else f"{sr_recent:.1f}"

    logger.debug(
        f"{finished} episodes finished ({successes} successful), recent SR {recent}",
        extra={
            "step": step,
            "episodes_finished": finished,
            "episodes_successful": successes,
            "sr_recent": sr_recent,
        },
    )


def log_checkpoint(step: int, path: Path):
    """Log a checkpoint write."""
    logger = get_logger("checkpoint")

    logger.info(
        f"Checkpoint saved at step {step}: {path}",
        extra={"step": step, "path": str(path)},
    )


def log_evaluation(split: str, episodes: int, sr: float, spl: float, sna: float, **kwargs):
    """Log aggregate metrics for one evaluation split."""
    logger = get_logger("evaluation")

    logger.info(
        f"{split}: SR {sr:.1f} / SPL {spl:.1f} / SNA {sna:.1f} over {episodes} episodes",
        extra={
            "split": split,
            "episodes": episodes,
            "sr": sr,
            "spl": spl,
            "sna": sna,
            **kwargs,
        },
    )


def log_error(error: Exception, context: str, **kwargs):
    """Log error with context."""
    logger = get_logger("error")

    logger.error(
        f"{context}: {str(error)}",
        exc_info=True,
        extra={
            "context": context,
            "error_type": type(error).__name__,
            **getattr(error, "details", {}),
            **kwargs,
        },
    )


def set_run_context(run_id: str, variant: Optional[str] = None):
    """Set context variables for run tracking."""
    run_id_var.set(run_id)
    if variant:
        variant_var.set(variant)


def clear_run_context():
    """Clear run context variables."""
    run_id_var.set(None)
    variant_var.set(None)

"""
Error hierarchy for the navigation testbed.

Every error raised on purpose by the package derives from RavnError so the
CLI can turn it into a clean non-zero exit.
"""

from typing import Any, Dict, Optional


class RavnError(Exception):
    """Base class for all expected failures."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        return self.message


class InvalidArgumentError(RavnError, ValueError):
    """An operation was called with arguments outside its contract."""


class MapFormatError(RavnError, ValueError):
    """Map text is ragged or contains characters other than '#' and '.'."""


class DegenerateMapError(RavnError):
    """Map cannot host an episode (too few Free cells, no valid start/goal pair)."""


class UnreachableError(RavnError):
    """Goal cannot be reached from the given cell or pose."""


class EpisodeProtocolError(RavnError):
    """Environment used out of order (step before reset, step after done)."""


class ConfigurationError(RavnError):
    """Network submodule called for a variant that does not have it."""


class ShapeError(RavnError, ValueError):
    """Tensor shape does not match the network configuration."""


class CheckpointError(RavnError):
    """Checkpoint file is missing, truncated or not a checkpoint."""


class CheckpointVersionError(CheckpointError):
    """Checkpoint was written by an incompatible format version."""


class TrainingDivergedError(RavnError):
    """A loss term became non-finite during an update."""


class ConfigError(RavnError):
    """Run configuration could not be parsed or validated."""

    def __init__(
        self,
        message: str,
        key: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        details: Dict[str, Any] = {}
        if key is not None:
            details["key"] = key
        if line is not None:
            details["line"] = line
            details["column"] = column
        super().__init__(message, details)
        self.key = key
        self.line = line
        self.column = column

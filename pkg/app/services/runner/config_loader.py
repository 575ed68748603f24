"""
Run configuration loading.

A run is described by one JSON document whose keys are the fields of
RunConfig. Unknown keys are rejected, missing keys take their defaults, and
the fully-resolved document (every key and seed explicit) is written to
`<out_dir>/resolved_config.json`.
"""

import json
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

from app.core.config import load_settings
from app.core.exceptions import ConfigError
from app.core.logging import get_logger
from app.schemas.config import RunConfig

logger = get_logger("config")

RESOLVED_CONFIG = "resolved_config.json"


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate a JSON document; no filesystem checks."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{source}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}",
            line=e.lineno,
            column=e.colno,
        ) from e

    if not isinstance(data, dict):
        raise ConfigError(f"{source}: the configuration must be a JSON object")

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or None
        where = f"'{key}'" if key else "configuration"
        raise ConfigError(f"{source}: invalid {where}: {first['msg']}", key=key) from e


def resolve_config(config: RunConfig, seed_override: Optional[int] = None) -> RunConfig:
    """Apply the RAVN_SEED override and write every derived seed explicitly."""
    if seed_override is None:
        seed_override = load_settings().ravn_seed
    if seed_override is not None and seed_override < 0:
        raise ConfigError(f"RAVN_SEED must be non-negative, got {seed_override}", key="seed")
    return config.with_seeds_resolved(seed_override)


def write_resolved_config(config: RunConfig, out_dir: Union[str, Path, None] = None) -> Path:
    out_dir = Path(out_dir if out_dir is not None else config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / RESOLVED_CONFIG
    path.write_text(json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n")
    return path


def load_config(
    path: Union[str, Path],
    seed_override: Optional[int] = None,
    echo: bool = True,
) -> RunConfig:
    """
    Read, validate and resolve a run configuration file.

    Raises ConfigError with line/column for malformed JSON and with the
    offending key for validation failures.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read configuration {path}: {e.strerror or e}") from e

    config = resolve_config(parse_config(text, str(path)), seed_override)

    if not Path(config.map_dir).is_dir():
        raise ConfigError(
            f"{path}: 'map_dir' {config.map_dir} is not a directory", key="map_dir"
        )

    if echo:
        resolved = write_resolved_config(config)
        logger.info(f"Resolved configuration written to {resolved}", extra={"path": str(resolved)})
    return config

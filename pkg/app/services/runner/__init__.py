"""Run configuration loading and the command workflows behind the CLI."""

from app.services.runner.config_loader import (
    RESOLVED_CONFIG,
    load_config,
    parse_config,
    resolve_config,
    write_resolved_config,
)
from app.services.runner.workflows import (
    AGENTS,
    ablate_run,
    eval_run,
    plot_run,
    probe_run,
    train_run,
    variant_config,
)

__all__ = [
    "AGENTS",
    "RESOLVED_CONFIG",
    "ablate_run",
    "eval_run",
    "load_config",
    "parse_config",
    "plot_run",
    "probe_run",
    "resolve_config",
    "train_run",
    "variant_config",
    "write_resolved_config",
]

"""Rollouts, GAE, PPO updates, the training loop and the supervised reliability probe."""

from app.services.trainer.ppo import (
    clip_gradients,
    make_optimizer,
    normalized_advantages,
    replay,
    update,
)
from app.services.trainer.probe import (
    ProbeData,
    best_constant_nll,
    fit_probe,
    run_probe,
    sample_probe_data,
)
from app.services.trainer.rollout import (
    EnvPool,
    RolloutBatch,
    collect_rollouts,
    compute_gae,
    gae_advantages,
    mask_hidden,
)
from app.services.trainer.training import LOG_HEADER, train

__all__ = [
    "EnvPool",
    "LOG_HEADER",
    "ProbeData",
    "RolloutBatch",
    "best_constant_nll",
    "clip_gradients",
    "collect_rollouts",
    "compute_gae",
    "fit_probe",
    "gae_advantages",
    "make_optimizer",
    "mask_hidden",
    "normalized_advantages",
    "replay",
    "run_probe",
    "sample_probe_data",
    "train",
    "update",
]

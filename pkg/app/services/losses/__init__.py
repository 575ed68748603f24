"""Training objectives: distance NLL/MSE, wrapped azimuth loss, PPO and the total."""

from app.services.losses.objectives import (
    PPOTerms,
    TotalLoss,
    ang_loss,
    aux_terms,
    dist_mse,
    dist_nll,
    ppo_loss,
    total_loss,
    wrap_angle,
)

__all__ = [
    "PPOTerms",
    "TotalLoss",
    "ang_loss",
    "aux_terms",
    "dist_mse",
    "dist_nll",
    "ppo_loss",
    "total_loss",
    "wrap_angle",
]

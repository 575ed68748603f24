"""
Training loop: collect -> GAE -> update until total_steps.

Outputs in `out_dir`:
- train_log.csv        one row per update (loss terms, recent SR, mean sigma^2)
- train_episodes.csv   one row per finished training episode
- checkpoint.pt        final parameters
- checkpoints/         periodic parameters
"""

import csv
import math
from pathlib import Path
from typing import Mapping, Optional, Union

from app.core.exceptions import ConfigurationError
from app.core.logging import get_logger, log_checkpoint, log_episode_batch, log_update
from app.schemas.config import ModelConfig, ObservationConfig, RewardConfig, TrainConfig
from app.schemas.records import LossBreakdown, TrainResult
from app.services.analytics import TrainingTracker
from app.services.model import build_network, save_params
from app.services.trainer.ppo import make_optimizer, update
from app.services.trainer.rollout import EnvPool, collect_rollouts, compute_gae
from app.services.world import GridMap

logger = get_logger("trainer")

LOG_HEADER = [
    "step",
    "sr_recent",
    "l_total",
    "l_policy",
    "l_value",
    "l_entropy",
    "l_dist",
    "l_ang",
    "mean_sigma2",
]
EPISODE_HEADER = ["episode_index", "env", "map_id", "sound_class", "success", "steps"]


def format_value(value: Optional[float]) -> str:
    """CSV cell: empty when undefined, otherwise 10 significant digits."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return format(value, ".10g")


def log_row(step: int, tracker: TrainingTracker, losses: LossBreakdown) -> list:
    return [
        step,
        format_value(tracker.sr_recent),
        format_value(losses.l_total),
        format_value(losses.l_ppo_policy),
        format_value(losses.l_value),
        format_value(losses.l_entropy),
        format_value(losses.l_dist),
        format_value(losses.l_ang),
        format_value(tracker.mean_sigma2),
    ]


def train(
    train_config: TrainConfig,
    model_config: ModelConfig,
    maps: Mapping[str, GridMap],
    obs_config: ObservationConfig,
    out_dir: Union[str, Path],
    reward_config: Optional[RewardConfig] = None,
) -> TrainResult:
    """Train one network and write its checkpoint and logs to `out_dir`."""
    if model_config.variant != train_config.variant:
        raise ConfigurationError(
            f"Network variant {model_config.variant.value} does not match "
            f"training variant {train_config.variant.value}"
        )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "checkpoints").mkdir(exist_ok=True)

    network = build_network(model_config, seed=train_config.model_seed)
    optimizer = make_optimizer(network, train_config)
    pool = EnvPool(
        maps,
        obs_config,
        classes=train_config.heard_classes,
        max_steps=train_config.max_steps,
        env_seed=train_config.env_seed,
        num_envs=train_config.num_envs,
        hidden_dim=model_config.hidden_dim,
        reward_config=reward_config,
    )
    tracker = TrainingTracker()

    updates = math.ceil(train_config.total_steps / train_config.steps_per_update)
    log_path = out_dir / "train_log.csv"
    episodes_path = out_dir / "train_episodes.csv"
    checkpoint_path = out_dir / "checkpoint.pt"

    logger.info(
        f"Training {model_config.variant.value} for {updates} updates "
        f"({updates * train_config.steps_per_update} steps) on {len(maps)} maps",
        extra={
            "variant": model_config.variant.value,
            "updates": updates,
            "num_envs": train_config.num_envs,
            "rollout_length": train_config.rollout_length,
        },
    )

    with open(log_path, "w", newline="") as log_file, open(
        episodes_path, "w", newline=""
    ) as episodes_file:
        log_writer = csv.writer(log_file, lineterminator="\n")
        episode_writer = csv.writer(episodes_file, lineterminator="\n")
        log_writer.writerow(LOG_HEADER)
        episode_writer.writerow(EPISODE_HEADER)

        step = 0
        for update_index in range(updates):
            batch = collect_rollouts(pool, network, train_config.rollout_length)
            compute_gae(batch, train_config.gamma, train_config.gae_lambda)
            step += batch.num_transitions

            finished = pool.drain_finished()
            for episode in finished:
                tracker.track_episode(episode)
                episode_writer.writerow(
                    [
                        episode.episode_index,
                        episode.env,
                        episode.map_id,
                        episode.sound_class,
                        int(episode.success),
                        episode.steps,
                    ]
                )
            tracker.track_rollout(batch.sigma2)
            log_episode_batch(
                step, len(finished), sum(e.success for e in finished), tracker.sr_recent
            )

            losses = update(network, optimizer, batch, train_config, update_index)
            log_writer.writerow(log_row(step, tracker, losses))
            log_file.flush()
            log_update(
                step,
                update_index,
                losses.model_dump(exclude_none=True),
                sr_recent=tracker.sr_recent,
                mean_sigma2=tracker.mean_sigma2,
            )

            if (update_index + 1) % train_config.checkpoint_interval == 0:
                periodic = save_params(network, out_dir / "checkpoints" / f"step_{step:09d}.pt")
                log_checkpoint(step, periodic)

    save_params(network, checkpoint_path)
    log_checkpoint(step, checkpoint_path)

    return TrainResult(
        checkpoint_path=str(checkpoint_path),
        log_path=str(log_path),
        episodes_path=str(episodes_path),
        updates=updates,
        steps=step,
        sr_recent=tracker.sr_recent,
    )

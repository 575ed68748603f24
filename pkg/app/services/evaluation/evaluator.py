"""Frozen-agent evaluation over fixed episode lists."""

from typing import List, Mapping, Optional, Sequence

from app.core.exceptions import InvalidArgumentError
from app.core.logging import get_logger
from app.core.reproducibility import make_rng
from app.schemas.config import ObservationConfig, RewardConfig
from app.schemas.records import EpisodeRecord
from app.services.env import NavigationEnv
from app.services.evaluation.agents import Agent
from app.services.world import (
    Episode,
    GridMap,
    geodesic_distance,
    min_action_count,
    sample_episodes,
)

logger = get_logger("evaluation")

EVAL_NOISE_STREAM = 1
SPLITS = ("heard", "unheard")


def split_episodes(
    maps: Mapping[str, GridMap],
    classes: Sequence[int],
    count: int,
    max_steps: int,
    seed: int,
    split: str,
) -> List[Episode]:
    """
    Fixed evaluation episodes for one split.

    Episode ids are unique across splits (heard first), so per-episode noise
    and agent streams never collide.
    """
    if split not in SPLITS:
        raise InvalidArgumentError(f"Unknown split '{split}', expected one of {SPLITS}")
    split_index = SPLITS.index(split)
    grids = [maps[name] for name in sorted(maps)]
    return sample_episodes(
        grids,
        make_rng(seed, split_index),
        classes,
        max_steps,
        count,
        first_id=split_index * count,
    )


def evaluate(
    agent: Agent,
    episodes: Sequence[Episode],
    maps: Mapping[str, GridMap],
    obs_config: ObservationConfig,
    split: str,
    eval_seed: int = 0,
    reward_config: Optional[RewardConfig] = None,
) -> List[EpisodeRecord]:
    """Run every episode to completion and return records in episode order."""
    env = NavigationEnv(maps, obs_config, reward_config)
    records: List[EpisodeRecord] = []

    for episode in episodes:
        grid = maps[episode.map_id]
        obs, info = env.reset(episode, noise_stream=(EVAL_NOISE_STREAM, eval_seed, episode.episode_id))
        agent.reset(episode, grid)

        sigma2: List[float] = []
        gate_mean: List[float] = []
        occlusion: List[int] = []
        success = False
        done = False

        while not done:
            decision = agent.act(obs)
            occlusion.append(info.occlusion_k)
            if decision.sigma2 is not None:
                sigma2.append(decision.sigma2)
            if decision.gate_mean is not None:
                gate_mean.append(decision.gate_mean)

            result = env.step(decision.action)
            obs, info, done = result.obs, result.info, result.done
            success = result.info.success

        records.append(
            EpisodeRecord(
                episode_id=episode.episode_id,
                split=split,
                map_id=episode.map_id,
                sound_class=episode.sound_class,
                start=episode.start.as_tuple(),
                goal=episode.goal,
                success=success,
                geodesic=geodesic_distance(grid, episode.start.cell, episode.goal),
                path_length=env.path_length,
                actions=env.steps,
                min_actions=min_action_count(grid, episode.start, episode.goal),
                trajectory=[pose.as_tuple() for pose in env.trajectory],
                sigma2=sigma2,
                gate_mean=gate_mean,
                occlusion=occlusion,
            )
        )

    logger.debug(
        f"Evaluated {len(records)} {split} episodes with {agent.name} agent",
        extra={"split": split, "episodes": len(records), "agent": agent.name},
    )
    return records

"""
Rollout collection and advantage estimation.

K environments step in lockstep; their transitions are stored in env-index
order. Every environment owns two generators derived from the env seed: one
samples episodes (heard classes only) and one samples actions, so a rollout is
a pure function of (seeds, parameters, pool state).
"""

from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence

import numpy as np
import torch
from torch.distributions import Categorical

from app.core.exceptions import InvalidArgumentError
from app.core.reproducibility import make_rng
from app.schemas.config import ObservationConfig, RewardConfig
from app.services.analytics import FinishedEpisode
from app.services.env import NUM_ACTIONS, NavigationEnv, Observation, StepInfo
from app.services.model import RavnNetwork
from app.services.world import GridMap, sample_episode

EPISODE_STREAM = 0
ACTION_STREAM = 1
TRAIN_NOISE_STREAM = 0


@dataclass
class RolloutBatch:
    """T steps x K envs of transitions, indexed [t, k]."""
    spectra: torch.Tensor          # (T, K, 2F)
    depths: torch.Tensor           # (T, K, R)
    actions: torch.Tensor          # (T, K) int64
    log_probs: torch.Tensor        # (T, K)
    values: np.ndarray             # (T, K)
    rewards: np.ndarray            # (T, K)
    dones: np.ndarray              # (T, K) episode ended by the action at t
    starts: torch.Tensor           # (T, K) hidden state zeroed before step t
    bootstrap: np.ndarray          # (T, K) V(final observation) where truncated at t, else 0
    initial_hidden: torch.Tensor   # (K, H) state entering the segment
    y_dist: torch.Tensor           # (T, K)
    y_ang: torch.Tensor            # (T, K)
    occlusion: np.ndarray          # (T, K)
    sigma2: np.ndarray             # (T, K) NaN without a distance head
    last_values: np.ndarray        # (K,)
    advantages: Optional[np.ndarray] = None
    returns: Optional[np.ndarray] = None

    @property
    def rollout_length(self) -> int:
        return self.actions.shape[0]

    @property
    def num_envs(self) -> int:
        return self.actions.shape[1]

    @property
    def num_transitions(self) -> int:
        return self.actions.numel()


class EnvPool:
    """K environments plus their episode samplers, action streams and recurrent state."""

    def __init__(
        self,
        maps: Mapping[str, GridMap],
        obs_config: ObservationConfig,
        classes: Sequence[int],
        max_steps: int,
        env_seed: int,
        num_envs: int,
        hidden_dim: int,
        reward_config: Optional[RewardConfig] = None,
        dtype: torch.dtype = torch.float32,
    ):
        if not maps:
            raise InvalidArgumentError("At least one training map is required")
        if num_envs < 1:
            raise InvalidArgumentError(f"num_envs must be positive, got {num_envs}")

        self.maps = dict(maps)
        self.map_ids = sorted(self.maps)
        self.classes = list(classes)
        self.max_steps = max_steps
        self.num_envs = num_envs
        self.dtype = dtype

        self.envs = [NavigationEnv(self.maps, obs_config, reward_config) for _ in range(num_envs)]
        self._episode_rngs = [make_rng(env_seed, k, EPISODE_STREAM) for k in range(num_envs)]
        self._action_rngs = [make_rng(env_seed, k, ACTION_STREAM) for k in range(num_envs)]
        self._counts = [0] * num_envs

        self.hidden = torch.zeros(num_envs, hidden_dim, dtype=dtype)
        self.starts = torch.ones(num_envs, dtype=torch.bool)
        self.obs: List[Optional[Observation]] = [None] * num_envs
        self.info: List[Optional[StepInfo]] = [None] * num_envs
        self.finished: List[FinishedEpisode] = []

        for k in range(num_envs):
            self.reset_env(k)

    def reset_env(self, k: int):
        rng = self._episode_rngs[k]
        grid = self.maps[self.map_ids[int(rng.integers(len(self.map_ids)))]]
        episode_id = k + self.num_envs * self._counts[k]
        self._counts[k] += 1

        episode = sample_episode(grid, rng, self.classes, self.max_steps, episode_id)
        self.obs[k], self.info[k] = self.envs[k].reset(
            episode, noise_stream=(TRAIN_NOISE_STREAM, episode_id)
        )
        self.starts[k] = True

    def sample_action(self, k: int, probs: np.ndarray) -> int:
        return int(self._action_rngs[k].choice(NUM_ACTIONS, p=probs))

    def observation_tensors(self, envs: Optional[Sequence[int]] = None):
        envs = range(self.num_envs) if envs is None else envs
        spectra = np.stack([self.obs[k].audio.spectrum for k in envs])
        depths = np.stack([self.obs[k].visual.depths for k in envs])
        return (
            torch.as_tensor(spectra, dtype=self.dtype),
            torch.as_tensor(depths, dtype=self.dtype),
        )

    def masked_hidden(self) -> torch.Tensor:
        return mask_hidden(self.hidden, self.starts)

    def drain_finished(self) -> List[FinishedEpisode]:
        finished, self.finished = self.finished, []
        return finished


def mask_hidden(hidden: torch.Tensor, starts: torch.Tensor) -> torch.Tensor:
    """Zero the recurrent state of every env whose episode starts now."""
    return torch.where(starts.unsqueeze(-1), torch.zeros_like(hidden), hidden)


def collect_rollouts(pool: EnvPool, network: RavnNetwork, rollout_length: int) -> RolloutBatch:
    """Step all envs for `rollout_length` steps with fixed parameters."""
    if rollout_length < 1:
        raise InvalidArgumentError(f"rollout_length must be positive, got {rollout_length}")

    T, K = rollout_length, pool.num_envs
    spectra, depths, log_probs, starts = [], [], [], []
    actions = np.zeros((T, K), dtype=np.int64)
    values = np.zeros((T, K))
    rewards = np.zeros((T, K))
    dones = np.zeros((T, K), dtype=bool)
    bootstrap = np.zeros((T, K))
    y_dist = np.zeros((T, K))
    y_ang = np.zeros((T, K))
    occlusion = np.zeros((T, K), dtype=np.int64)
    sigma2 = np.full((T, K), np.nan)

    initial_hidden = pool.hidden.clone()

    with torch.no_grad():
        for t in range(T):
            spectra_t, depths_t = pool.observation_tensors()
            starts_t = pool.starts.clone()
            out = network(spectra_t, depths_t, mask_hidden(pool.hidden, starts_t))

            logits = out.policy.logits
            probs = torch.softmax(logits.double(), dim=-1).numpy()
            for k in range(K):
                actions[t, k] = pool.sample_action(k, probs[k])
            actions_t = torch.as_tensor(actions[t])

            spectra.append(spectra_t)
            depths.append(depths_t)
            starts.append(starts_t)
            log_probs.append(Categorical(logits=logits).log_prob(actions_t))
            values[t] = out.policy.value.double().numpy()
            if out.agr is not None:
                sigma2[t] = out.agr.sigma2.double().numpy()
            for k in range(K):
                y_dist[t, k] = pool.info[k].targets.y_dist
                y_ang[t, k] = pool.info[k].targets.y_ang
                occlusion[t, k] = pool.info[k].occlusion_k

            pool.hidden = out.policy.h_t
            pool.starts = torch.zeros(K, dtype=torch.bool)

            truncated, ended = [], []
            for k in range(K):
                env = pool.envs[k]
                result = env.step(int(actions[t, k]))
                rewards[t, k] = result.reward
                dones[t, k] = result.done
                pool.obs[k], pool.info[k] = result.obs, result.info
                if result.truncated:
                    truncated.append(k)
                if result.done:
                    ended.append(k)
                    pool.finished.append(
                        FinishedEpisode(
                            episode_index=env.episode.episode_id,
                            env=k,
                            map_id=env.episode.map_id,
                            sound_class=env.episode.sound_class,
                            success=result.info.success,
                            steps=env.steps,
                        )
                    )

            if truncated:
                final_spectra, final_depths = pool.observation_tensors(truncated)
                final = network(final_spectra, final_depths, pool.hidden[truncated])
                bootstrap[t, truncated] = final.policy.value.double().numpy()

            for k in ended:
                pool.reset_env(k)

        spectra_T, depths_T = pool.observation_tensors()
        last = network(spectra_T, depths_T, pool.masked_hidden())
        last_values = last.policy.value.double().numpy()

    dtype = pool.dtype
    return RolloutBatch(
        spectra=torch.stack(spectra),
        depths=torch.stack(depths),
        actions=torch.as_tensor(actions),
        log_probs=torch.stack(log_probs),
        values=values,
        rewards=rewards,
        dones=dones,
        starts=torch.stack(starts),
        bootstrap=bootstrap,
        initial_hidden=initial_hidden,
        y_dist=torch.as_tensor(y_dist, dtype=dtype),
        y_ang=torch.as_tensor(y_ang, dtype=dtype),
        occlusion=occlusion,
        sigma2=sigma2,
        last_values=last_values,
    )


def gae_advantages(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    last_values: np.ndarray,
    gamma: float,
    gae_lambda: float,
):
    """
    Generalized advantage estimates over axis 0.

    delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
    A_t = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
    Returns (advantages, returns) with returns = A + V.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    not_done = 1.0 - np.asarray(dones, dtype=np.float64)
    next_values = np.asarray(last_values, dtype=np.float64)

    advantages = np.zeros_like(rewards)
    running = np.zeros_like(next_values)
    for t in reversed(range(rewards.shape[0])):
        delta = rewards[t] + gamma * next_values * not_done[t] - values[t]
        running = delta + gamma * gae_lambda * not_done[t] * running
        advantages[t] = running
        next_values = values[t]

    return advantages, advantages + values


def compute_gae(batch: RolloutBatch, gamma: float, gae_lambda: float) -> RolloutBatch:
    """Fill advantages and returns; truncated steps bootstrap from V(final observation)."""
    rewards = batch.rewards + gamma * batch.bootstrap
    batch.advantages, batch.returns = gae_advantages(
        rewards, batch.values, batch.dones, batch.last_values, gamma, gae_lambda
    )
    return batch

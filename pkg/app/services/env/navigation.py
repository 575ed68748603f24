"""
Navigation environment.

One instance runs one episode at a time and is single-writer. Audio noise for
step t of an episode is drawn from a generator keyed on
(audio_seed, *noise_stream, t), so any observation can be reproduced in
isolation.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from app.core.exceptions import EpisodeProtocolError, InvalidArgumentError
from app.core.reproducibility import make_rng
from app.schemas.config import ObservationConfig, RewardConfig
from app.services.observe import (
    AudioObs,
    ClassSignature,
    GeometricTargets,
    VisualObs,
    class_signature,
    render_audio,
    render_depth,
    targets,
)
from app.services.world import (
    Action,
    Episode,
    GridMap,
    Pose,
    geodesic_distance,
    occlusion_count,
    validate_episode,
)


@dataclass(frozen=True)
class Observation:
    audio: AudioObs
    visual: VisualObs


@dataclass(frozen=True)
class StepInfo:
    geodesic_now: int
    targets: GeometricTargets
    success: bool
    occlusion_k: int
    pose: Pose
    moved: bool = False


@dataclass(frozen=True)
class StepResult:
    obs: Observation
    reward: float
    done: bool
    info: StepInfo
    truncated: bool = False


class NavigationEnv:
    """
    Reset/step protocol over a set of maps.

    Forward moves one cell along the heading when that cell is Free and bumps
    otherwise; turns rotate by 90 degrees; Stop ends the episode and succeeds
    only on the goal cell. The episode also ends after `max_steps` actions.
    """

    def __init__(
        self,
        maps: Mapping[str, GridMap],
        obs_config: ObservationConfig,
        reward_config: Optional[RewardConfig] = None,
    ):
        self.maps = dict(maps)
        self.obs_config = obs_config
        self.reward_config = reward_config or RewardConfig()

        self._signatures: Dict[Tuple[int, int], ClassSignature] = {}
        self._episode: Optional[Episode] = None
        self._grid: Optional[GridMap] = None
        self._pose: Optional[Pose] = None
        self._audio_seed = obs_config.audio_seed
        self._noise_stream: Tuple[int, ...] = (0,)
        self._steps = 0
        self._geodesic = 0
        self._done = True

        self.trajectory: List[Pose] = []
        self.path_length = 0

    # --- properties ---

    @property
    def episode(self) -> Optional[Episode]:
        return self._episode

    @property
    def pose(self) -> Optional[Pose]:
        return self._pose

    @property
    def steps(self) -> int:
        return self._steps

    @property
    def done(self) -> bool:
        return self._done

    # --- protocol ---

    def reset(
        self,
        episode: Episode,
        noise_stream: Union[int, Sequence[int]],
        audio_seed: Optional[int] = None,
    ) -> Tuple[Observation, StepInfo]:
        """Place the agent at the episode start and render the first observation."""
        grid = self.maps.get(episode.map_id)
        if grid is None:
            raise InvalidArgumentError(f"Unknown map '{episode.map_id}'")
        validate_episode(grid, episode)

        self._episode = episode
        self._grid = grid
        self._pose = episode.start
        self._audio_seed = self.obs_config.audio_seed if audio_seed is None else audio_seed
        self._noise_stream = (
            (int(noise_stream),) if isinstance(noise_stream, int) else tuple(noise_stream)
        )
        self._steps = 0
        self._geodesic = geodesic_distance(grid, episode.start.cell, episode.goal)
        self._done = False

        self.trajectory = [episode.start]
        self.path_length = 0

        obs = self._observe()
        return obs, self._info(success=False)

    def step(self, action: Action) -> StepResult:
        if self._done or self._episode is None:
            raise EpisodeProtocolError("step() called on an environment with no active episode")

        action = Action(action)
        grid, episode = self._grid, self._episode
        moved = False

        if action == Action.FORWARD:
            ahead = self._pose.ahead()
            if grid.is_free(ahead):
                self._pose = self._pose.moved_to(ahead)
                self.path_length += 1
                moved = True
        elif action in (Action.TURN_LEFT, Action.TURN_RIGHT):
            self._pose = self._pose.turned(action)

        self._steps += 1
        self.trajectory.append(self._pose)

        stopped = action == Action.STOP
        success = stopped and self._pose.cell == episode.goal
        truncated = not stopped and self._steps >= episode.max_steps
        self._done = stopped or truncated

        previous = self._geodesic
        self._geodesic = geodesic_distance(grid, self._pose.cell, episode.goal)

        rc = self.reward_config
        reward = rc.progress_weight * (previous - self._geodesic) - rc.step_penalty
        if success:
            reward += rc.success_reward

        return StepResult(
            obs=self._observe(),
            reward=reward,
            done=self._done,
            info=self._info(success=success, moved=moved),
            truncated=truncated,
        )

    # --- helpers ---

    def _signature(self, class_id: int) -> ClassSignature:
        key = (self._audio_seed, class_id)
        if key not in self._signatures:
            self._signatures[key] = class_signature(
                class_id, self._audio_seed, self.obs_config.spectrum_bins
            )
        return self._signatures[key]

    def _observe(self) -> Observation:
        episode = self._episode
        rng = make_rng(self._audio_seed, *self._noise_stream, self._steps)
        audio = render_audio(
            self._grid,
            self._pose,
            episode.goal,
            self._signature(episode.sound_class),
            rng,
            self.obs_config,
        )
        visual = render_depth(self._grid, self._pose, self.obs_config)
        return Observation(audio=audio, visual=visual)

    def _info(self, success: bool, moved: bool = False) -> StepInfo:
        return StepInfo(
            geodesic_now=self._geodesic,
            targets=targets(self._grid, self._pose, self._episode.goal, self.obs_config.d_max),
            success=success,
            occlusion_k=occlusion_count(self._grid, self._pose.cell, self._episode.goal),
            pose=self._pose,
            moved=moved,
        )

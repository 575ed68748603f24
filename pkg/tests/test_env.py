"""
Tests for the navigation environment protocol.
"""

import numpy as np
import pytest

from app.core.exceptions import EpisodeProtocolError, InvalidArgumentError
from app.core.reproducibility import make_rng
from app.schemas.config import RewardConfig
from app.services.env import Action, NavigationEnv
from app.services.observe import class_signature, render_audio
from app.services.world import Episode, Heading, Pose, geodesic_distance, plan_min_actions


class TestNavigationEnv:
    """Test reset/step semantics and rewards."""

    @pytest.fixture
    def env(self, open_map, obs_config):
        return NavigationEnv({open_map.name: open_map}, obs_config)

    @pytest.fixture
    def episode(self, open_map):
        return Episode(
            map_id=open_map.name,
            start=Pose(0, 0, Heading.EAST),
            goal=(4, 0),
            sound_class=1,
            max_steps=20,
        )

    def test_reset_is_deterministic(self, env, episode):
        first, _ = env.reset(episode, noise_stream=(0, 3))
        second, _ = env.reset(episode, noise_stream=(0, 3))
        np.testing.assert_array_equal(first.audio.spectrum, second.audio.spectrum)
        np.testing.assert_array_equal(first.visual.depths, second.visual.depths)

    def test_noise_stream_changes_audio(self, env, episode):
        first, _ = env.reset(episode, noise_stream=(0, 3))
        second, _ = env.reset(episode, noise_stream=(0, 4))
        assert not np.array_equal(first.audio.spectrum, second.audio.spectrum)

    def test_reset_info(self, env, episode):
        _, info = env.reset(episode, noise_stream=0)
        assert info.geodesic_now == 4
        assert info.success is False
        assert info.occlusion_k == 0
        assert info.targets.y_ang == 0.0
        assert env.steps == 0

    def test_forward_progress_reward(self, env, episode):
        env.reset(episode, noise_stream=0)
        result = env.step(Action.FORWARD)
        assert result.reward == pytest.approx(0.99)
        assert result.info.geodesic_now == 3
        assert not result.done

    def test_turn_reward(self, env, episode):
        env.reset(episode, noise_stream=0)
        result = env.step(Action.TURN_LEFT)
        assert result.reward == pytest.approx(-0.01)
        assert env.pose == Pose(0, 0, Heading.NORTH)

    def test_stop_on_goal(self, env, episode):
        env.reset(episode, noise_stream=0)
        for _ in range(4):
            env.step(Action.FORWARD)
        result = env.step(Action.STOP)
        assert result.reward == pytest.approx(9.99)
        assert result.done
        assert result.info.success
        assert not result.truncated

    def test_stop_off_goal_fails(self, env, episode):
        env.reset(episode, noise_stream=0)
        result = env.step(Action.STOP)
        assert result.done
        assert not result.info.success
        assert result.reward == pytest.approx(-0.01)

    def test_bump_keeps_pose(self, env, episode):
        env.reset(episode, noise_stream=0)
        env.step(Action.TURN_LEFT)
        result = env.step(Action.FORWARD)
        assert env.pose == Pose(0, 0, Heading.NORTH)
        assert not result.info.moved
        assert env.path_length == 0

    def test_step_after_done(self, env, episode):
        env.reset(episode, noise_stream=0)
        env.step(Action.STOP)
        with pytest.raises(EpisodeProtocolError):
            env.step(Action.FORWARD)

    def test_step_before_reset(self, env):
        with pytest.raises(EpisodeProtocolError):
            env.step(Action.FORWARD)

    def test_invalid_episode(self, env, open_map):
        bad = Episode(open_map.name, Pose(0, 0, Heading.EAST), (1, 0), 0, 10)
        with pytest.raises(InvalidArgumentError):
            env.reset(bad, noise_stream=0)

    def test_unknown_map(self, env):
        bad = Episode("nowhere", Pose(0, 0, Heading.EAST), (4, 0), 0, 10)
        with pytest.raises(InvalidArgumentError):
            env.reset(bad, noise_stream=0)

    def test_truncation(self, env, open_map):
        episode = Episode(open_map.name, Pose(0, 0, Heading.EAST), (4, 0), 0, max_steps=3)
        env.reset(episode, noise_stream=0)
        results = [env.step(Action.TURN_LEFT) for _ in range(3)]
        assert [r.done for r in results] == [False, False, True]
        assert results[-1].truncated
        assert not results[-1].info.success

    def test_custom_reward_config(self, open_map, obs_config, episode):
        env = NavigationEnv(
            {open_map.name: open_map},
            obs_config,
            RewardConfig(progress_weight=2.0, step_penalty=0.5, success_reward=1.0),
        )
        env.reset(episode, noise_stream=0)
        assert env.step(Action.FORWARD).reward == pytest.approx(1.5)

    def test_audio_matches_keyed_stream(self, env, episode, open_map, obs_config):
        env.reset(episode, noise_stream=(1, 9, 2))
        env.step(Action.FORWARD)
        result = env.step(Action.FORWARD)

        expected = render_audio(
            open_map,
            result.info.pose,
            episode.goal,
            class_signature(episode.sound_class, obs_config.audio_seed, obs_config.spectrum_bins),
            make_rng(obs_config.audio_seed, 1, 9, 2, 2),
            obs_config,
        )
        np.testing.assert_array_equal(result.obs.audio.spectrum, expected.spectrum)


class TestEpisodeProperties:
    """Whole-episode invariants on the desk maps."""

    def test_rewards_telescope_on_minimal_plan(self, desk_maps, obs_config):
        grid = desk_maps["map09_maze"]
        env = NavigationEnv({grid.name: grid}, obs_config)
        episode = Episode(grid.name, Pose(1, 1, Heading.SOUTH), (12, 12), 0, max_steps=200)
        plan = plan_min_actions(grid, episode.start, episode.goal)
        d0 = geodesic_distance(grid, episode.start.cell, episode.goal)

        env.reset(episode, noise_stream=0)
        total = sum(env.step(action).reward for action in plan)

        assert env.done
        assert total == pytest.approx(d0 - 0.01 * len(plan) + 10.0)
        assert env.path_length == d0

    def test_random_walk_stays_on_free_cells(self, desk_maps, obs_config):
        grid = desk_maps["map06_pillars"]
        env = NavigationEnv({grid.name: grid}, obs_config)
        episode = Episode(grid.name, Pose(1, 1, Heading.EAST), (10, 10), 0, max_steps=60)
        rng = make_rng(3)

        env.reset(episode, noise_stream=0)
        progress = 0.0
        transitions = 0
        while not env.done:
            action = Action(int(rng.choice([0, 0, 1, 2])))
            result = env.step(action)
            transitions += 1
            progress += result.reward + 0.01
            assert grid.is_free(env.pose.cell)

        assert transitions == 60
        d0 = geodesic_distance(grid, episode.start.cell, episode.goal)
        assert progress == pytest.approx(d0 - result.info.geodesic_now)
        assert len(env.trajectory) == transitions + 1

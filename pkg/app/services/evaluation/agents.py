"""
Agents that can be evaluated.

Every agent is reset at the start of an episode and then asked for one action
per observation. Besides the action it reports what it knows about audio
reliability at that step (predicted sigma^2 and gate mean), when it has them.
"""

from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence

import numpy as np
import torch

from app.core.exceptions import InvalidArgumentError
from app.core.reproducibility import make_rng
from app.services.env import NUM_ACTIONS, Observation
from app.services.model import RavnNetwork
from app.services.world import Action, Episode, GridMap, plan_min_actions

AGENT_STREAM = 2


@dataclass(frozen=True)
class Decision:
    action: Action
    sigma2: Optional[float] = None
    gate_mean: Optional[float] = None


class Agent:
    """Base agent. `seed` feeds the per-episode generator of stochastic agents."""

    name = "agent"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = make_rng(seed, AGENT_STREAM, 0)

    def reset(self, episode: Episode, grid: GridMap):
        self.rng = make_rng(self.seed, AGENT_STREAM, episode.episode_id)

    def act(self, obs: Observation) -> Decision:
        raise NotImplementedError


class PolicyAgent(Agent):
    """Frozen network; greedy argmax by default, or sampled from the logits."""

    name = "policy"

    def __init__(
        self,
        network: RavnNetwork,
        mode: Literal["greedy", "sampled"] = "greedy",
        seed: int = 0,
    ):
        if mode not in ("greedy", "sampled"):
            raise InvalidArgumentError(f"Unknown evaluation mode '{mode}'")
        super().__init__(seed)
        self.network = network.eval()
        self.mode = mode
        self.dtype = network.actor.weight.dtype
        self.hidden = network.initial_state(1)

    def reset(self, episode: Episode, grid: GridMap):
        super().reset(episode, grid)
        self.hidden = self.network.initial_state(1)

    def act(self, obs: Observation) -> Decision:
        spectrum = torch.as_tensor(obs.audio.spectrum, dtype=self.dtype).unsqueeze(0)
        depths = torch.as_tensor(obs.visual.depths, dtype=self.dtype).unsqueeze(0)

        with torch.no_grad():
            out = self.network(spectrum, depths, self.hidden)
        self.hidden = out.policy.h_t

        logits = out.policy.logits[0]
        if self.mode == "greedy":
            action = int(torch.argmax(logits))
        else:
            probs = torch.softmax(logits.double(), dim=-1).numpy()
            action = int(self.rng.choice(NUM_ACTIONS, p=probs))

        return Decision(
            action=Action(action),
            sigma2=float(out.agr.sigma2[0]) if out.agr is not None else None,
            gate_mean=float(out.mask.mean()) if out.mask is not None else None,
        )


class RandomAgent(Agent):
    """Uniform over the four actions."""

    name = "random"

    def act(self, obs: Observation) -> Decision:
        return Decision(action=Action(int(self.rng.integers(NUM_ACTIONS))))


class ScriptedAgent(Agent):
    """Replays a fixed action list, then keeps issuing Stop."""

    name = "scripted"

    def __init__(self, actions: Sequence[Action], seed: int = 0):
        super().__init__(seed)
        self.actions: List[Action] = [Action(a) for a in actions]
        self._cursor = 0

    def reset(self, episode: Episode, grid: GridMap):
        super().reset(episode, grid)
        self._cursor = 0

    def act(self, obs: Observation) -> Decision:
        if self._cursor >= len(self.actions):
            return Decision(action=Action.STOP)
        action = self.actions[self._cursor]
        self._cursor += 1
        return Decision(action=action)


class OracleAgent(ScriptedAgent):
    """Follows a minimal action plan computed from the map at reset."""

    name = "oracle"

    def __init__(self, seed: int = 0):
        super().__init__([], seed)

    def reset(self, episode: Episode, grid: GridMap):
        super().reset(episode, grid)
        self.actions = plan_min_actions(grid, episode.start, episode.goal)

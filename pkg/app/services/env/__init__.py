"""Episode protocol: reset/step semantics, rewards and termination."""

from app.services.env.navigation import NavigationEnv, Observation, StepInfo, StepResult
from app.services.world import Action, NUM_ACTIONS

__all__ = [
    "Action",
    "NUM_ACTIONS",
    "NavigationEnv",
    "Observation",
    "StepInfo",
    "StepResult",
]

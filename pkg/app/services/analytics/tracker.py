"""
Training analytics.

Tracks:
- Success rate over the most recent finished training episodes
- Predicted distance variance on the latest rollout
"""

from collections import deque
from dataclasses import dataclass
from typing import Deque, Optional

import numpy as np

RECENT_EPISODES = 100


@dataclass(frozen=True)
class FinishedEpisode:
    """One training episode as it appears in train_episodes.csv."""
    episode_index: int
    env: int
    map_id: str
    sound_class: int
    success: bool
    steps: int


class TrainingTracker:
    """In-memory tracker for one training run."""

    def __init__(self, window: int = RECENT_EPISODES):
        self.recent: Deque[bool] = deque(maxlen=window)
        self._sigma2: Optional[float] = None

    def track_episode(self, episode: FinishedEpisode):
        self.recent.append(episode.success)

    def track_rollout(self, sigma2: np.ndarray):
        """Record the predicted variances of one rollout; NaN entries are ignored."""
        finite = sigma2[np.isfinite(sigma2)]
        self._sigma2 = float(finite.mean()) if finite.size else None

    @property
    def sr_recent(self) -> Optional[float]:
        """Success rate in percent over the recent window, None before any episode ends."""
        if not self.recent:
            return None
        return 100.0 * sum(self.recent) / len(self.recent)

    @property
    def mean_sigma2(self) -> Optional[float]:
        return self._sigma2

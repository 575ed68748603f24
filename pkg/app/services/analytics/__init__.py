"""Training analytics tracking."""

from app.services.analytics.tracker import FinishedEpisode, TrainingTracker

__all__ = [
    "FinishedEpisode",
    "TrainingTracker",
]

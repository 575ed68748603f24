"""Occupancy-grid scenes, pose kinematics and navigation oracles."""

from app.services.world.kinematics import Action, Cell, Heading, NUM_ACTIONS, Pose
from app.services.world.grid import (
    Episode,
    GridMap,
    MIN_EPISODE_GEODESIC,
    geodesic_distance,
    load_map,
    load_map_dir,
    min_action_count,
    occlusion_count,
    plan_min_actions,
    sample_episode,
    sample_episodes,
    supercover_cells,
    validate_episode,
)

__all__ = [
    "Action",
    "Cell",
    "Episode",
    "GridMap",
    "Heading",
    "MIN_EPISODE_GEODESIC",
    "NUM_ACTIONS",
    "Pose",
    "geodesic_distance",
    "load_map",
    "load_map_dir",
    "min_action_count",
    "occlusion_count",
    "plan_min_actions",
    "sample_episode",
    "sample_episodes",
    "supercover_cells",
    "validate_episode",
]

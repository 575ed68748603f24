"""Depth rays: the visual half of the observation."""

import math
from dataclasses import dataclass

import numpy as np

from app.schemas.config import ObservationConfig
from app.services.world import GridMap, Pose

# A wall in the adjacent cell reads one cell: distances are measured from the
# agent's cell centre plus half a cell of body offset.
BODY_OFFSET = 0.5
# Nudges samples that land exactly on a cell boundary into the cell ahead.
_BOUNDARY_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class VisualObs:
    """Normalized ray distances in [0, 1], left-most ray first."""
    depths: np.ndarray


def ray_angles(pose: Pose, rays: int, fov_deg: float) -> np.ndarray:
    half = math.radians(fov_deg) / 2.0
    if rays == 1:
        offsets = np.zeros(1)
    else:
        offsets = np.linspace(half, -half, rays)
    return pose.heading.angle + offsets


def render_depth(grid: GridMap, pose: Pose, config: ObservationConfig) -> VisualObs:
    """
    March R rays across the field of view until they enter a Wall cell.

    Rays advance in `depth_step` increments up to `depth_range`; out-of-bounds
    cells count as Wall. Depth = hit distance / range, capped at 1.
    """
    angles = ray_angles(pose, config.depth_rays, config.fov_deg)
    n_steps = int(round(config.depth_range / config.depth_step))
    ts = np.arange(1, n_steps + 1) * config.depth_step

    ox, oy = pose.x + 0.5, pose.y + 0.5
    # Map y grows downward, so the "up" component is negated.
    xs = ox + np.outer(np.cos(angles), ts + _BOUNDARY_EPS)
    ys = oy - np.outer(np.sin(angles), ts + _BOUNDARY_EPS)
    cx = np.floor(xs).astype(np.int64)
    cy = np.floor(ys).astype(np.int64)

    inside = (cx >= 0) & (cx < grid.width) & (cy >= 0) & (cy < grid.height)
    hit = ~inside
    hit[inside] = grid.walls[cy[inside], cx[inside]]

    any_hit = hit.any(axis=1)
    first = hit.argmax(axis=1)
    distance = np.where(any_hit, ts[first] + BODY_OFFSET, config.depth_range)
    depths = np.minimum(distance / config.depth_range, 1.0)
    return VisualObs(depths=depths)

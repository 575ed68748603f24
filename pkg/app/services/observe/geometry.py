"""Angles in the agent frame and the geometric supervision targets."""

import math
from dataclasses import dataclass

from app.core.exceptions import InvalidArgumentError
from app.services.world import Cell, GridMap, Pose, geodesic_distance

TWO_PI = 2.0 * math.pi


def wrap_radians(x: float) -> float:
    """Wrap an angle to (-pi, pi]; -pi maps to +pi."""
    y = x - TWO_PI * math.floor((x + math.pi) / TWO_PI)
    if y <= -math.pi:
        y += TWO_PI
    elif y > math.pi:
        y -= TWO_PI
    return y


def relative_azimuth(pose: Pose, goal: Cell) -> float:
    """
    Direction from the agent to `goal` in the agent frame.

    0 is straight ahead and +pi/2 is to the agent's left; the map's y axis
    points down, so it is flipped to make North "up".
    """
    if goal == pose.cell:
        raise InvalidArgumentError(f"Azimuth is undefined at the agent's own cell {goal}")
    dx = goal[0] - pose.x
    dy_up = pose.y - goal[1]
    return wrap_radians(math.atan2(dy_up, dx) - pose.heading.angle)


def source_azimuth(pose: Pose, goal: Cell) -> float:
    """relative_azimuth, with 0 when the agent stands on the source cell."""
    return 0.0 if goal == pose.cell else relative_azimuth(pose, goal)


@dataclass(frozen=True)
class GeometricTargets:
    """Supervision for the distance and azimuth heads."""
    y_dist: float   # geodesic / d_max, clamped to 1
    y_ang: float    # radians in (-pi, pi]


def targets(grid: GridMap, pose: Pose, goal: Cell, d_max: float) -> GeometricTargets:
    d = geodesic_distance(grid, pose.cell, goal)
    if d is None:
        raise InvalidArgumentError(
            f"Goal {goal} is unreachable from {pose.cell} on map '{grid.name}'"
        )
    return GeometricTargets(y_dist=min(d / d_max, 1.0), y_ang=source_azimuth(pose, goal))

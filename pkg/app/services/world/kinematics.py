"""
Discrete headings, the four-action set and their effect on a pose.

Map coordinates put row 0 at the top, so North is y - 1.
"""

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Tuple

Cell = Tuple[int, int]


class Heading(IntEnum):
    """Agent heading, clockwise from North."""
    NORTH = 0
    EAST = 1
    SOUTH = 2
    WEST = 3

    @property
    def delta(self) -> Cell:
        """(dx, dy) of one Forward move."""
        return _DELTAS[self]

    @property
    def angle(self) -> float:
        """Heading in radians, counter-clockwise from East with North = +pi/2."""
        return _ANGLES[self]

    def turned_left(self) -> "Heading":
        return Heading((self - 1) % 4)

    def turned_right(self) -> "Heading":
        return Heading((self + 1) % 4)


_DELTAS = {
    Heading.NORTH: (0, -1),
    Heading.EAST: (1, 0),
    Heading.SOUTH: (0, 1),
    Heading.WEST: (-1, 0),
}

_ANGLES = {
    Heading.NORTH: math.pi / 2,
    Heading.EAST: 0.0,
    Heading.SOUTH: -math.pi / 2,
    Heading.WEST: math.pi,
}


class Action(IntEnum):
    """The agent's action set; values index the policy logits."""
    FORWARD = 0
    TURN_LEFT = 1
    TURN_RIGHT = 2
    STOP = 3


NUM_ACTIONS = len(Action)


@dataclass(frozen=True)
class Pose:
    """Discrete agent pose on a GridMap."""
    x: int
    y: int
    heading: Heading

    @property
    def cell(self) -> Cell:
        return (self.x, self.y)

    def ahead(self) -> Cell:
        dx, dy = self.heading.delta
        return (self.x + dx, self.y + dy)

    def turned(self, action: Action) -> "Pose":
        if action == Action.TURN_LEFT:
            return Pose(self.x, self.y, self.heading.turned_left())
        if action == Action.TURN_RIGHT:
            return Pose(self.x, self.y, self.heading.turned_right())
        return self

    def moved_to(self, cell: Cell) -> "Pose":
        return Pose(cell[0], cell[1], self.heading)

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.x, self.y, int(self.heading))

"""
Occupancy-grid scenes and their oracles.

Provides:
- Map parsing ('#' = Wall, '.' = Free, row 0 at the top)
- Geodesic distance (4-connected BFS)
- Minimal action plans over (x, y, heading)
- Occlusion counting along the straight source-agent segment
- Episode sampling
"""

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import (
    DegenerateMapError,
    InvalidArgumentError,
    MapFormatError,
    UnreachableError,
)
from app.services.world.kinematics import Action, Cell, Heading, Pose

MIN_EPISODE_GEODESIC = 3
MAX_SAMPLE_DRAWS = 10_000

_WALL = "#"
_FREE = "."


@dataclass(frozen=True, eq=False)
class GridMap:
    """
    Immutable occupancy grid.

    `walls[y, x]` is True for Wall cells. Everything outside the bounds is a
    Wall. BFS distance fields are memoised per target cell, which is safe
    because the grid never changes after construction.
    """
    name: str
    walls: np.ndarray
    _fields: Dict[Cell, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.walls.setflags(write=False)

    @property
    def width(self) -> int:
        return int(self.walls.shape[1])

    @property
    def height(self) -> int:
        return int(self.walls.shape[0])

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and not self.walls[cell[1], cell[0]]

    def is_wall(self, cell: Cell) -> bool:
        return not self.is_free(cell)

    @property
    def free_cells(self) -> List[Cell]:
        ys, xs = np.nonzero(~self.walls)
        return [(int(x), int(y)) for y, x in zip(ys, xs)]

    def to_text(self) -> str:
        return "\n".join(
            "".join(_WALL if wall else _FREE for wall in row) for row in self.walls
        )

    def distance_field(self, target: Cell) -> np.ndarray:
        """BFS distances (in cells) from every cell to `target`; -1 where unreachable."""
        if target not in self._fields:
            self._fields[target] = _bfs_field(self, target)
        return self._fields[target]


def load_map(text: str, name: str = "map") -> GridMap:
    """
    Parse map-file contents.

    Args:
        text: Newline-separated rows of equal length using only '#' and '.'
        name: Identifier stored on the map (file stem when loaded from disk)

    Returns:
        GridMap with the same row/column order
    """
    rows = text.replace("\r\n", "\n").split("\n")
    if rows and rows[-1] == "":
        rows = rows[:-1]
    if not rows:
        raise MapFormatError(f"Map '{name}' is empty")

    width = len(rows[0])
    for y, row in enumerate(rows):
        if len(row) != width:
            raise MapFormatError(
                f"Map '{name}' row {y} has {len(row)} columns, expected {width}",
                {"row": y},
            )
        for x, char in enumerate(row):
            if char not in (_WALL, _FREE):
                raise MapFormatError(
                    f"Map '{name}' has illegal character {char!r} at row {y}, column {x}",
                    {"row": y, "column": x},
                )

    walls = np.array([[char == _WALL for char in row] for row in rows], dtype=bool)
    free_count = int((~walls).sum())
    if free_count < 2:
        raise DegenerateMapError(
            f"Map '{name}' has {free_count} Free cell(s); at least two are required",
            {"free_cells": free_count},
        )

    return GridMap(name=name, walls=walls)


def load_map_dir(directory: Path, names: Optional[Sequence[str]] = None) -> Dict[str, GridMap]:
    """Load every `*.map` file in a directory, keyed by file stem in sorted order."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.map"))
    if not paths:
        raise InvalidArgumentError(f"No *.map files found in {directory}")

    maps = {
        path.stem: load_map(path.read_text(encoding="utf-8"), name=path.stem)
        for path in paths
    }
    if names is None:
        return maps

    missing = [name for name in names if name not in maps]
    if missing:
        raise InvalidArgumentError(f"Maps not found in {directory}: {', '.join(missing)}")
    return {name: maps[name] for name in names}


def _bfs_field(grid: GridMap, target: Cell) -> np.ndarray:
    dist = np.full((grid.height, grid.width), -1, dtype=np.int64)
    if not grid.is_free(target):
        return dist

    dist[target[1], target[0]] = 0
    queue = deque([target])
    while queue:
        x, y = queue.popleft()
        here = dist[y, x]
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if grid.is_free((nx, ny)) and dist[ny, nx] < 0:
                dist[ny, nx] = here + 1
                queue.append((nx, ny))
    return dist


def _require_free(grid: GridMap, cell: Cell, role: str):
    if not grid.is_free(cell):
        raise InvalidArgumentError(
            f"{role} cell {cell} is not a Free cell of map '{grid.name}'",
            {"cell": cell},
        )


def geodesic_distance(grid: GridMap, start: Cell, goal: Cell) -> Optional[int]:
    """
    Shortest 4-connected path length through Free cells.

    Returns None when the cells are in different connected components.
    """
    _require_free(grid, start, "Start")
    _require_free(grid, goal, "Goal")

    d = int(grid.distance_field(goal)[start[1], start[0]])
    return d if d >= 0 else None


def plan_min_actions(grid: GridMap, start: Pose, goal: Cell) -> List[Action]:
    """
    One minimal action sequence that ends with Stop executed on `goal`.

    Breadth-first search over (x, y, heading) states; Forward is only expanded
    when the cell ahead is Free since a bump never helps.
    """
    _require_free(grid, start.cell, "Start")
    _require_free(grid, goal, "Goal")

    parents: Dict[Pose, Tuple[Optional[Pose], Optional[Action]]] = {start: (None, None)}
    queue = deque([start])
    found: Optional[Pose] = None

    while queue:
        pose = queue.popleft()
        if pose.cell == goal:
            found = pose
            break
        for action in (Action.FORWARD, Action.TURN_LEFT, Action.TURN_RIGHT):
            if action == Action.FORWARD:
                ahead = pose.ahead()
                if not grid.is_free(ahead):
                    continue
                nxt = pose.moved_to(ahead)
            else:
                nxt = pose.turned(action)
            if nxt not in parents:
                parents[nxt] = (pose, action)
                queue.append(nxt)

    if found is None:
        raise UnreachableError(
            f"Goal {goal} is unreachable from {start.cell} on map '{grid.name}'",
            {"start": start.cell, "goal": goal},
        )

    plan: List[Action] = [Action.STOP]
    node = found
    while True:
        parent, action = parents[node]
        if parent is None:
            break
        plan.append(action)
        node = parent
    plan.reverse()
    return plan


def min_action_count(grid: GridMap, start: Pose, goal: Cell) -> int:
    """Minimum number of actions (Stop included) needed to succeed from `start`."""
    return len(plan_min_actions(grid, start, goal))


def supercover_cells(a: Cell, b: Cell) -> List[Cell]:
    """
    Every cell touched by the segment between the centres of `a` and `b`.

    Integer grid traversal: at each step the segment leaves the current cell
    through whichever boundary it meets first; when it passes exactly through
    a corner both side cells are included.
    """
    x, y = a
    nx, ny = abs(b[0] - a[0]), abs(b[1] - a[1])
    sx = 1 if b[0] > a[0] else -1
    sy = 1 if b[1] > a[1] else -1

    cells = [(x, y)]
    ix = iy = 0
    while ix < nx or iy < ny:
        decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx
        if decision == 0:
            cells.append((x + sx, y))
            cells.append((x, y + sy))
            x += sx
            y += sy
            ix += 1
            iy += 1
        elif decision < 0:
            x += sx
            ix += 1
        else:
            y += sy
            iy += 1
        cells.append((x, y))
    return cells


def occlusion_count(grid: GridMap, a: Cell, b: Cell) -> int:
    """Number of Wall cells crossed by the straight segment between cell centres."""
    return sum(1 for cell in set(supercover_cells(a, b)) if grid.is_wall(cell))


@dataclass(frozen=True)
class Episode:
    """One navigation task: reach `goal` from `start` and execute Stop there."""
    map_id: str
    start: Pose
    goal: Cell
    sound_class: int
    max_steps: int
    episode_id: int = 0


def validate_episode(grid: GridMap, episode: Episode):
    """Raise InvalidArgumentError unless the episode satisfies its invariants."""
    if episode.map_id != grid.name:
        raise InvalidArgumentError(
            f"Episode map '{episode.map_id}' does not match map '{grid.name}'"
        )
    if episode.max_steps < 1:
        raise InvalidArgumentError(f"max_steps must be positive, got {episode.max_steps}")
    if not grid.is_free(episode.start.cell) or not grid.is_free(episode.goal):
        raise InvalidArgumentError("Episode start and goal must be Free cells")
    if episode.start.cell == episode.goal:
        raise InvalidArgumentError("Episode start and goal coincide")

    d = geodesic_distance(grid, episode.start.cell, episode.goal)
    if d is None or d < MIN_EPISODE_GEODESIC:
        raise InvalidArgumentError(
            f"Episode geodesic {d} is unreachable or below {MIN_EPISODE_GEODESIC}",
            {"geodesic": d},
        )


def sample_episode(
    grid: GridMap,
    rng: np.random.Generator,
    classes: Sequence[int],
    max_steps: int,
    episode_id: int = 0,
) -> Episode:
    """
    Draw a valid episode.

    Start cell, heading and goal cell are uniform and resampled until the
    goal is reachable at geodesic >= 3; the sound class is uniform over
    `classes`. Deterministic given the generator state.
    """
    if not classes:
        raise InvalidArgumentError("At least one candidate sound class is required")
    if max_steps < 1:
        raise InvalidArgumentError(f"max_steps must be positive, got {max_steps}")

    free = grid.free_cells
    for _ in range(MAX_SAMPLE_DRAWS):
        start = free[int(rng.integers(len(free)))]
        heading = Heading(int(rng.integers(4)))
        goal = free[int(rng.integers(len(free)))]

        d = int(grid.distance_field(goal)[start[1], start[0]])
        if d >= MIN_EPISODE_GEODESIC:
            sound_class = int(classes[int(rng.integers(len(classes)))])
            return Episode(
                map_id=grid.name,
                start=Pose(start[0], start[1], heading),
                goal=goal,
                sound_class=sound_class,
                max_steps=max_steps,
                episode_id=episode_id,
            )

    raise DegenerateMapError(
        f"No start/goal pair with geodesic >= {MIN_EPISODE_GEODESIC} found on map "
        f"'{grid.name}' after {MAX_SAMPLE_DRAWS} draws"
    )


def sample_episodes(
    maps: Iterable[GridMap],
    rng: np.random.Generator,
    classes: Sequence[int],
    max_steps: int,
    count: int,
    first_id: int = 0,
) -> List[Episode]:
    """Draw `count` episodes cycling over `maps` in order."""
    grids = list(maps)
    if not grids:
        raise InvalidArgumentError("At least one map is required")
    return [
        sample_episode(grids[i % len(grids)], rng, classes, max_steps, episode_id=first_id + i)
        for i in range(count)
    ]

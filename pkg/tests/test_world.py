"""
Tests for map parsing, kinematics and the navigation oracles.
"""

import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.exceptions import (
    DegenerateMapError,
    InvalidArgumentError,
    MapFormatError,
    UnreachableError,
)
from app.core.reproducibility import make_rng
from app.services.world import (
    Action,
    Heading,
    MIN_EPISODE_GEODESIC,
    Pose,
    geodesic_distance,
    load_map,
    load_map_dir,
    min_action_count,
    occlusion_count,
    plan_min_actions,
    sample_episode,
    sample_episodes,
    supercover_cells,
)

ZIGZAG = "#####\n#...#\n###.#\n#...#\n#####"


def open_grid(width, height):
    return load_map("\n".join(["." * width] * height), name=f"open{width}x{height}")


def execute(grid, pose, actions):
    """Replay actions with the environment's kinematics; returns (pose, stopped)."""
    for action in actions:
        if action == Action.STOP:
            return pose, True
        if action == Action.FORWARD:
            if grid.is_free(pose.ahead()):
                pose = pose.moved_to(pose.ahead())
        else:
            pose = pose.turned(action)
    return pose, False


def random_grid(rng, max_width, max_height, wall_rate=0.3):
    """Random wall layout with at least two Free cells."""
    while True:
        width = int(rng.integers(2, max_width + 1))
        height = int(rng.integers(2, max_height + 1))
        walls = rng.random((height, width)) < wall_rate
        if (~walls).sum() >= 2:
            rows = ["".join("#" if wall else "." for wall in row) for row in walls]
            return load_map("\n".join(rows), name=f"random{width}x{height}")


def action_counts_by_search(grid, start):
    """Fewest actions from `start` to every reachable pose, bumps included, by plain BFS."""
    moves = (Action.FORWARD, Action.TURN_LEFT, Action.TURN_RIGHT)
    counts = {start: 0}
    queue = deque([start])
    while queue:
        pose = queue.popleft()
        for action in moves:
            nxt, _ = execute(grid, pose, [action])
            if nxt not in counts:
                counts[nxt] = counts[pose] + 1
                queue.append(nxt)
    return counts


class TestLoadMap:
    """Test map-file parsing."""

    def test_all_free(self):
        grid = load_map("....\n....")
        assert grid.width == 4
        assert grid.height == 2
        assert len(grid.free_cells) == 8

    def test_trailing_newline_optional(self):
        assert load_map("#..\n...\n").to_text() == load_map("#..\n...").to_text()

    def test_row_column_order(self):
        grid = load_map("#..\n...")
        assert grid.is_wall((0, 0))
        assert grid.is_free((1, 0))
        assert grid.is_free((0, 1))

    def test_single_free_cell_is_degenerate(self):
        with pytest.raises(DegenerateMapError):
            load_map("###\n#.#\n###")

    def test_illegal_character(self):
        with pytest.raises(MapFormatError):
            load_map("..\n.x")

    def test_ragged_rows(self):
        with pytest.raises(MapFormatError) as exc:
            load_map("...\n..")
        assert exc.value.details["row"] == 1

    def test_out_of_bounds_is_wall(self):
        grid = load_map("....\n....")
        assert grid.is_wall((-1, 0))
        assert grid.is_wall((4, 0))
        assert grid.is_wall((0, 2))

    def test_load_map_dir(self, maps_dir):
        maps = load_map_dir(maps_dir)
        assert len(maps) == 10
        assert list(maps) == sorted(maps)
        assert maps["map01_open"].width == 10

    def test_load_map_dir_subset(self, maps_dir):
        maps = load_map_dir(maps_dir, ["map05_corridor", "map01_open"])
        assert list(maps) == ["map05_corridor", "map01_open"]

    def test_load_map_dir_missing_name(self, maps_dir):
        with pytest.raises(InvalidArgumentError):
            load_map_dir(maps_dir, ["no_such_map"])

    def test_load_map_dir_empty(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            load_map_dir(tmp_path)


class TestKinematics:
    """Test headings, turns and forward deltas."""

    def test_turns_are_inverse(self):
        for heading in Heading:
            assert heading.turned_left().turned_right() == heading

    def test_turn_right_is_clockwise(self):
        assert Heading.NORTH.turned_right() == Heading.EAST
        assert Heading.WEST.turned_right() == Heading.NORTH

    def test_north_is_up(self):
        assert Pose(2, 2, Heading.NORTH).ahead() == (2, 1)
        assert Pose(2, 2, Heading.EAST).ahead() == (3, 2)


class TestGeodesic:
    """Test BFS geodesic distance."""

    def test_open_grid_is_manhattan(self):
        assert geodesic_distance(open_grid(5, 5), (0, 0), (2, 3)) == 5

    def test_identity(self):
        assert geodesic_distance(open_grid(5, 5), (3, 1), (3, 1)) == 0

    def test_zigzag(self):
        grid = load_map(ZIGZAG)
        assert geodesic_distance(grid, (1, 1), (1, 3)) == 6

    def test_wall_endpoint(self):
        grid = load_map(ZIGZAG)
        with pytest.raises(InvalidArgumentError):
            geodesic_distance(grid, (0, 0), (1, 1))

    def test_unreachable(self):
        grid = load_map("..#..\n..#..")
        assert geodesic_distance(grid, (0, 0), (4, 0)) is None

    @settings(max_examples=50, deadline=None)
    @given(
        width=st.integers(3, 8),
        height=st.integers(3, 8),
        data=st.data(),
    )
    def test_open_maps_match_manhattan(self, width, height, data):
        grid = open_grid(width, height)
        cell = st.tuples(st.integers(0, width - 1), st.integers(0, height - 1))
        a = data.draw(cell)
        b = data.draw(cell)
        assert geodesic_distance(grid, a, b) == abs(a[0] - b[0]) + abs(a[1] - b[1])

    def test_metric_axioms(self):
        grid = load_map("......\n.##.#.\n...#..\n.#....\n.#.##.\n......")
        free = grid.free_cells
        dist = {(a, b): geodesic_distance(grid, a, b) for a in free for b in free}

        for a, b in itertools.product(free, repeat=2):
            assert dist[a, b] == dist[b, a]
            assert (dist[a, b] == 0) == (a == b)
        for a, b, c in itertools.product(free, repeat=3):
            assert dist[a, c] <= dist[a, b] + dist[b, c]


class TestMinActions:
    """Test the minimal-action oracle."""

    def test_straight_ahead(self):
        grid = open_grid(5, 5)
        assert min_action_count(grid, Pose(0, 0, Heading.EAST), (3, 0)) == 4

    def test_turn_then_forward(self):
        grid = open_grid(5, 5)
        assert min_action_count(grid, Pose(0, 0, Heading.NORTH), (1, 0)) == 3

    def test_already_on_goal(self):
        grid = open_grid(5, 5)
        assert min_action_count(grid, Pose(2, 2, Heading.SOUTH), (2, 2)) == 1

    def test_two_turns(self):
        grid = open_grid(5, 5)
        assert min_action_count(grid, Pose(0, 0, Heading.NORTH), (2, 2)) == 7

    def test_plan_reaches_goal(self, desk_maps):
        grid = desk_maps["map09_maze"]
        start = Pose(1, 1, Heading.SOUTH)
        goal = (12, 12)
        plan = plan_min_actions(grid, start, goal)

        assert plan[-1] == Action.STOP
        end, stopped = execute(grid, start, plan)
        assert stopped
        assert end.cell == goal

    def test_unreachable_goal(self):
        grid = load_map("..#..\n..#..")
        with pytest.raises(UnreachableError):
            min_action_count(grid, Pose(0, 0, Heading.EAST), (4, 1))

    def test_at_least_geodesic_plus_one(self, desk_maps):
        grid = desk_maps["map03_two_rooms"]
        rng = make_rng(4)
        free = grid.free_cells
        for _ in range(30):
            start = free[int(rng.integers(len(free)))]
            goal = free[int(rng.integers(len(free)))]
            pose = Pose(start[0], start[1], Heading(int(rng.integers(4))))
            assert min_action_count(grid, pose, goal) >= geodesic_distance(grid, start, goal) + 1

    def test_matches_exhaustive_search(self):
        grid = load_map("...\n.#.\n...")
        moves = (Action.FORWARD, Action.TURN_LEFT, Action.TURN_RIGHT)

        def shortest_by_enumeration(start, goal):
            for length in range(0, 8):
                for prefix in itertools.product(moves, repeat=length):
                    end, _ = execute(grid, start, prefix)
                    if end.cell == goal:
                        return length + 1
            return None

        for (x, y), heading, goal in itertools.product(
            grid.free_cells, Heading, [(2, 2), (0, 1)]
        ):
            start = Pose(x, y, heading)
            assert min_action_count(grid, start, goal) == shortest_by_enumeration(start, goal)

    def test_matches_search_on_random_maps(self):
        rng = make_rng(21)
        for _ in range(25):
            grid = random_grid(rng, 6, 6)
            free = grid.free_cells
            for (x, y), heading in itertools.product(free, Heading):
                start = Pose(x, y, heading)
                counts = action_counts_by_search(grid, start)
                for goal in free:
                    reached = [n for pose, n in counts.items() if pose.cell == goal]
                    if reached:
                        assert min_action_count(grid, start, goal) == min(reached) + 1
                    else:
                        with pytest.raises(UnreachableError):
                            min_action_count(grid, start, goal)


class TestOcclusion:
    """Test supercover rasterization and wall counting."""

    def test_adjacent_cells(self):
        grid = load_map(ZIGZAG)
        assert occlusion_count(grid, (1, 1), (2, 1)) == 0

    def test_same_open_room(self, open_map):
        assert occlusion_count(open_map, (0, 0), (7, 5)) == 0

    def test_one_wall_row(self):
        grid = load_map("....\n....\n###.\n....")
        assert occlusion_count(grid, (1, 1), (1, 3)) == 1

    def test_zigzag_two_walls(self):
        grid = load_map(ZIGZAG)
        assert occlusion_count(grid, (1, 1), (1, 3)) == 1
        assert occlusion_count(grid, (3, 1), (1, 3)) >= 1

    def test_corner_crossing_includes_both_sides(self):
        assert supercover_cells((0, 0), (1, 1)) == [(0, 0), (1, 0), (0, 1), (1, 1)]

    def test_shallow_segment(self):
        assert supercover_cells((0, 0), (2, 1)) == [(0, 0), (1, 0), (1, 1), (2, 1)]

    def test_symmetric(self, desk_maps):
        grid = desk_maps["map08_cross"]
        free = grid.free_cells
        rng = make_rng(9)
        for _ in range(200):
            a = free[int(rng.integers(len(free)))]
            b = free[int(rng.integers(len(free)))]
            assert occlusion_count(grid, a, b) == occlusion_count(grid, b, a)
            assert set(supercover_cells(a, b)) == set(supercover_cells(b, a))

    def test_symmetric_on_random_maps(self):
        rng = make_rng(22)
        for _ in range(50):
            grid = random_grid(rng, 12, 12)
            free = grid.free_cells
            for _ in range(1000):
                a = free[int(rng.integers(len(free)))]
                b = free[int(rng.integers(len(free)))]
                assert occlusion_count(grid, a, b) == occlusion_count(grid, b, a)


class TestSampleEpisode:
    """Test episode sampling."""

    def test_deterministic(self, desk_maps):
        grid = desk_maps["map04_three_rooms"]
        first = sample_episode(grid, make_rng(5), [0, 1, 2], 100)
        second = sample_episode(grid, make_rng(5), [0, 1, 2], 100)
        assert first == second

    def test_all_pairs_too_close(self):
        grid = load_map("..\n..")
        with pytest.raises(DegenerateMapError):
            sample_episode(grid, make_rng(0), [0], 10)

    def test_invariants_hold(self, open_map):
        rng = make_rng(1)
        for _ in range(1000):
            episode = sample_episode(open_map, rng, [3, 4], 50)
            assert open_map.is_free(episode.goal)
            assert open_map.is_free(episode.start.cell)
            assert geodesic_distance(open_map, episode.start.cell, episode.goal) >= MIN_EPISODE_GEODESIC
            assert episode.sound_class in (3, 4)

    def test_requires_classes(self, open_map):
        with pytest.raises(InvalidArgumentError):
            sample_episode(open_map, make_rng(0), [], 10)

    def test_sample_episodes_cycles_maps(self, desk_maps):
        grids = [desk_maps["map01_open"], desk_maps["map02_open_wide"]]
        episodes = sample_episodes(grids, make_rng(2), [0], 20, count=5, first_id=10)
        assert [e.map_id for e in episodes] == [
            "map01_open", "map02_open_wide", "map01_open", "map02_open_wide", "map01_open"
        ]
        assert [e.episode_id for e in episodes] == [10, 11, 12, 13, 14]
        assert np.all([e.max_steps == 20 for e in episodes])

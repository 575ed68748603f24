#!/usr/bin/env python3
"""
Generate the desk benchmark maps.

Creates ten occupancy grids with:
- Two open rooms (no interior walls, used by oracle tests)
- Multi-room layouts with single-cell doors
- Pillars, a U-shaped enclosure and a small maze for mixed occlusion

Every map has a full border wall. Interior walls are listed as inclusive
rectangles (x0, y0, x1, y1), so the output is identical on every run.
"""

from pathlib import Path

LAYOUTS = [
    ("map01_open", 10, 10, []),
    ("map02_open_wide", 12, 8, []),
    ("map03_two_rooms", 14, 10, [(7, 1, 7, 3), (7, 5, 7, 8)]),
    ("map04_three_rooms", 16, 10, [(5, 3, 5, 8), (10, 1, 10, 6)]),
    ("map05_corridor", 16, 9, [(1, 4, 12, 4)]),
    ("map06_pillars", 12, 12, [(3, 3, 4, 4), (7, 3, 8, 4), (3, 7, 4, 8), (7, 7, 8, 8)]),
    ("map07_u_shape", 12, 12, [(3, 3, 8, 3), (3, 4, 3, 8), (8, 4, 8, 8)]),
    ("map08_cross", 13, 13, [(6, 1, 6, 4), (6, 8, 6, 11), (1, 6, 4, 6), (8, 6, 11, 6)]),
    ("map09_maze", 14, 14, [(3, 1, 3, 9), (6, 4, 6, 12), (9, 1, 9, 9), (11, 4, 12, 4)]),
    (
        "map10_offices",
        15,
        12,
        [(5, 1, 5, 4), (5, 6, 5, 10), (10, 1, 10, 7), (10, 9, 10, 10), (1, 5, 3, 5)],
    ),
]


def render_layout(width, height, walls):
    """Map text for one layout, one row per line."""
    grid = [
        ["#" if x in (0, width - 1) or y in (0, height - 1) else "." for x in range(width)]
        for y in range(height)
    ]
    for x0, y0, x1, y1 in walls:
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                grid[y][x] = "#"
    return "".join("".join(row) + "\n" for row in grid)


def main():
    """Write every layout to test-data/maps."""
    output_dir = Path(__file__).parent / "maps"
    output_dir.mkdir(exist_ok=True)

    for name, width, height, walls in LAYOUTS:
        path = output_dir / f"{name}.map"
        path.write_text(render_layout(width, height, walls))
        print(f"Generated: {path}")

    print(f"\n{len(LAYOUTS)} maps written to {output_dir}")


if __name__ == "__main__":
    main()

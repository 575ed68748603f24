"""
Evaluation artifacts.

- metrics.csv         one row per split
- episodes.csv        one row per episode record
- trajectories.jsonl  full records, the input of `plot`
- svg/episode_<split>_<id>.svg   top-down trajectory renders
"""

import csv
import json
from pathlib import Path
from typing import List, Mapping, Optional, Sequence, Union

from jinja2 import Environment, FileSystemLoader

from app.core.exceptions import InvalidArgumentError
from app.schemas.records import EpisodeRecord, MetricsReport
from app.services.world import GridMap

TEMPLATES_DIR = Path(__file__).parent / "templates"
CELL_PX = 20
CAPTION_PX = 14

METRICS_HEADER = ["split", "episodes", "sr", "spl", "sna"]
EPISODES_HEADER = [
    "episode_id",
    "split",
    "success",
    "geodesic",
    "path",
    "actions",
    "min_actions",
    "mean_sigma2",
    "mean_occlusion",
]

_templates = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    autoescape=True,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _number(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def write_metrics_csv(report: MetricsReport, path: Path) -> Path:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for item in report.splits:
            writer.writerow(
                [item.split, item.episodes, f"{item.sr:.4f}", f"{item.spl:.4f}", f"{item.sna:.4f}"]
            )
    return path


def write_episodes_csv(records: Sequence[EpisodeRecord], path: Path) -> Path:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(EPISODES_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.episode_id,
                    r.split,
                    int(r.success),
                    r.geodesic,
                    r.path_length,
                    r.actions,
                    r.min_actions,
                    _number(r.mean_sigma2),
                    _number(r.mean_occlusion),
                ]
            )
    return path


def write_trajectories(records: Sequence[EpisodeRecord], path: Path) -> Path:
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r.model_dump(mode="json"), sort_keys=True) + "\n")
    return path


def read_trajectories(path: Union[str, Path]) -> List[EpisodeRecord]:
    path = Path(path)
    if path.suffix == ".csv":
        # episodes.csv only holds summaries; the traces live next to it
        path = path.with_name("trajectories.jsonl")
    if not path.is_file():
        raise InvalidArgumentError(f"Trajectory file not found: {path}")

    with open(path) as f:
        return [EpisodeRecord.model_validate_json(line) for line in f if line.strip()]


def _centre(x: int, y: int) -> dict:
    return {"x": x * CELL_PX + CELL_PX // 2, "y": y * CELL_PX + CELL_PX // 2}


def render_svg(record: EpisodeRecord, grid: GridMap) -> str:
    """Top-down render: walls, start, goal, trajectory and per-step gate means."""
    if record.map_id != grid.name:
        raise InvalidArgumentError(
            f"Record {record.episode_id} is on map '{record.map_id}', not '{grid.name}'"
        )

    walls = [
        {"x": x * CELL_PX, "y": y * CELL_PX}
        for y in range(grid.height)
        for x in range(grid.width)
        if grid.walls[y, x]
    ]
    vertices = [_centre(x, y) for x, y, _ in record.trajectory]
    points = " ".join(f"{v['x']},{v['y']}" for v in vertices)
    gate = [
        {
            **vertices[step],
            "step": step,
            "value": f"{value:.3f}",
            "opacity": f"{value:.3f}",
        }
        for step, value in enumerate(record.gate_mean[: len(vertices)])
    ]

    status = "success" if record.success else "failure"
    caption = (
        f"{record.split} #{record.episode_id} {status} "
        f"p={record.path_length} l={record.geodesic} n={record.actions}"
    )
    return _templates.get_template("trajectory.svg.j2").render(
        width=grid.width * CELL_PX,
        height=grid.height * CELL_PX + CAPTION_PX,
        cell=CELL_PX,
        marker=CELL_PX // 3,
        walls=walls,
        points=points,
        gate=gate,
        start=_centre(record.start[0], record.start[1]),
        goal=_centre(record.goal[0], record.goal[1]),
        title=f"{record.map_id} episode {record.episode_id}",
        caption=caption,
    )


def export_svgs(
    records: Sequence[EpisodeRecord],
    maps: Mapping[str, GridMap],
    out_dir: Path,
    count: Optional[int] = None,
) -> List[Path]:
    """Render the first `count` records of every split (all when count is None)."""
    svg_dir = Path(out_dir) / "svg"
    svg_dir.mkdir(parents=True, exist_ok=True)

    written: List[Path] = []
    per_split: dict = {}
    for record in records:
        seen = per_split.get(record.split, 0)
        if count is not None and seen >= count:
            continue
        per_split[record.split] = seen + 1
        path = svg_dir / f"episode_{record.split}_{record.episode_id:05d}.svg"
        path.write_text(render_svg(record, maps[record.map_id]))
        written.append(path)
    return written


def export_report(
    records: Sequence[EpisodeRecord],
    report: MetricsReport,
    out_dir: Union[str, Path],
    maps: Optional[Mapping[str, GridMap]] = None,
    svg_count: int = 0,
) -> List[Path]:
    """Write every evaluation artifact; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written = [
        write_metrics_csv(report, out_dir / "metrics.csv"),
        write_episodes_csv(records, out_dir / "episodes.csv"),
        write_trajectories(records, out_dir / "trajectories.jsonl"),
    ]
    if maps is not None and svg_count > 0:
        written.extend(export_svgs(records, maps, out_dir, svg_count))
    return written

"""
Shared fixtures: desk maps, small inline maps and a small network config.
"""

import json
from pathlib import Path

import pytest

from app.schemas.config import ModelConfig, ObservationConfig, Variant
from app.services.world import load_map, load_map_dir

REPO_ROOT = Path(__file__).resolve().parent.parent
MAPS_DIR = REPO_ROOT / "test-data" / "maps"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running training or probe runs")


@pytest.fixture
def maps_dir():
    return MAPS_DIR


@pytest.fixture
def desk_maps():
    return load_map_dir(MAPS_DIR)


@pytest.fixture
def open_map():
    """8x8 map with no walls at all."""
    return load_map("\n".join(["." * 8] * 8), name="open8")


@pytest.fixture
def bordered_map():
    """7x7 room: border wall around a 5x5 Free interior."""
    rows = ["#######"] + ["#.....#"] * 5 + ["#######"]
    return load_map("\n".join(rows), name="room7")


@pytest.fixture
def obs_config():
    return ObservationConfig(spectrum_bins=8, depth_rays=5, audio_seed=11)


@pytest.fixture
def small_model_config():
    return ModelConfig(
        spectrum_bins=8,
        depth_rays=5,
        audio_dim=8,
        visual_dim=8,
        geo_dim=8,
        hidden_dim=8,
        gate_hidden=8,
        variant=Variant.RAVN,
    )


@pytest.fixture
def write_config(tmp_path):
    """Write a run config JSON into tmp_path; map_dir and out_dir point at test locations."""

    def _write(overrides=None, name="config.json"):
        data = {"map_dir": str(MAPS_DIR), "out_dir": str(tmp_path / "run")}
        data.update(overrides or {})
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

    return _write

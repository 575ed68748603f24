"""
Tests for frozen-agent evaluation, SR/SPL/SNA and report export.
"""

import re

import pytest

from app.core.exceptions import InvalidArgumentError
from app.core.reproducibility import make_rng
from app.schemas.config import RunConfig, Variant
from app.schemas.records import EpisodeRecord
from app.services.evaluation import (
    EPISODES_HEADER,
    METRICS_HEADER,
    OracleAgent,
    PolicyAgent,
    RandomAgent,
    ScriptedAgent,
    compute_metrics,
    evaluate,
    export_report,
    read_trajectories,
    render_svg,
    split_episodes,
)
from app.services.model import build_network, load_network, save_params
from app.services.trainer import fit_probe, sample_probe_data
from app.services.world import Action


def make_record(success, geodesic=4, path_length=4, actions=5, min_actions=5, split="heard", **kwargs):
    return EpisodeRecord(
        episode_id=kwargs.pop("episode_id", 0),
        split=split,
        map_id="map01_open",
        sound_class=0,
        start=(1, 1, 1),
        goal=(5, 1),
        success=success,
        geodesic=geodesic,
        path_length=path_length,
        actions=actions,
        min_actions=min_actions,
        **kwargs,
    )


@pytest.fixture
def open_maps(desk_maps):
    return {name: desk_maps[name] for name in ("map01_open", "map02_open_wide")}


@pytest.fixture
def heard_episodes(open_maps):
    return split_episodes(open_maps, [0, 1, 2], count=12, max_steps=80, seed=4, split="heard")


class TestMetrics:
    """Test SR, SPL and SNA arithmetic."""

    def test_perfect_episode(self):
        report = compute_metrics([make_record(True)])
        assert (report.sr, report.spl, report.sna) == (100.0, 100.0, 100.0)

    def test_failure(self):
        report = compute_metrics([make_record(False)])
        assert (report.sr, report.spl, report.sna) == (0.0, 0.0, 0.0)

    def test_half_efficiency_plus_failure(self):
        records = [
            make_record(True, geodesic=4, path_length=8, actions=10, min_actions=5),
            make_record(False),
        ]
        report = compute_metrics(records)
        assert report.sr == 50.0
        assert report.spl == 25.0
        assert report.sna == 25.0

    def test_short_path_is_capped(self):
        report = compute_metrics([make_record(True, geodesic=6, path_length=4, actions=3, min_actions=7)])
        assert report.spl == 100.0
        assert report.sna == 100.0

    def test_per_split_breakdown(self):
        records = [make_record(True, split="heard"), make_record(False, split="unheard")]
        report = compute_metrics(records)
        assert [s.split for s in report.splits] == ["heard", "unheard"]
        assert report.split("heard").sr == 100.0
        assert report.split("unheard").sr == 0.0
        assert report.split("missing") is None
        assert report.episodes == 2

    def test_empty(self):
        with pytest.raises(InvalidArgumentError):
            compute_metrics([])


class TestEvaluate:
    """Test episode evaluation with reference agents."""

    def test_split_episode_ids(self, open_maps):
        heard = split_episodes(open_maps, [0, 1], count=5, max_steps=50, seed=1, split="heard")
        unheard = split_episodes(open_maps, [7], count=5, max_steps=50, seed=1, split="unheard")
        assert [e.episode_id for e in heard] == [0, 1, 2, 3, 4]
        assert [e.episode_id for e in unheard] == [5, 6, 7, 8, 9]
        assert {e.sound_class for e in unheard} == {7}
        assert heard == split_episodes(open_maps, [0, 1], count=5, max_steps=50, seed=1, split="heard")

    def test_unknown_split(self, open_maps):
        with pytest.raises(InvalidArgumentError):
            split_episodes(open_maps, [0], count=1, max_steps=5, seed=0, split="validation")

    def test_oracle_is_perfect_on_open_maps(self, open_maps, obs_config, heard_episodes):
        records = evaluate(OracleAgent(), heard_episodes, open_maps, obs_config, "heard")
        for record in records:
            assert record.success
            assert record.actions == record.min_actions
            assert record.path_length == record.geodesic
            assert len(record.trajectory) == record.actions + 1

        report = compute_metrics(records)
        assert (report.sr, report.spl, report.sna) == (100.0, 100.0, 100.0)

    def test_immediate_stop_fails(self, open_maps, obs_config, heard_episodes):
        records = evaluate(ScriptedAgent([]), heard_episodes[:3], open_maps, obs_config, "heard")
        assert all(not r.success for r in records)
        assert all(r.actions == 1 for r in records)
        assert all(r.path_length == 0 for r in records)

    def test_timeout_counts_every_action(self, open_maps, obs_config, heard_episodes):
        agent = ScriptedAgent([Action.TURN_LEFT] * 200)
        records = evaluate(agent, heard_episodes[:2], open_maps, obs_config, "heard")
        assert all(r.actions == 80 for r in records)
        assert all(len(r.occlusion) == 80 for r in records)

    def test_policy_is_deterministic(self, open_maps, obs_config, heard_episodes, small_model_config):
        network = build_network(small_model_config, seed=2)
        runs = [
            evaluate(PolicyAgent(network, seed=3), heard_episodes[:4], open_maps, obs_config, "heard")
            for _ in range(2)
        ]
        assert [r.model_dump() for r in runs[0]] == [r.model_dump() for r in runs[1]]

    def test_sampled_policy_is_deterministic(self, open_maps, obs_config, heard_episodes, small_model_config):
        network = build_network(small_model_config, seed=2)
        runs = [
            evaluate(PolicyAgent(network, mode="sampled", seed=3), heard_episodes[:4], open_maps, obs_config, "heard")
            for _ in range(2)
        ]
        assert [r.model_dump() for r in runs[0]] == [r.model_dump() for r in runs[1]]

    def test_policy_reliability_trace(self, open_maps, obs_config, heard_episodes, small_model_config):
        network = build_network(small_model_config, seed=2)
        records = evaluate(PolicyAgent(network), heard_episodes[:2], open_maps, obs_config, "heard")
        for record in records:
            assert len(record.sigma2) == record.actions
            assert len(record.gate_mean) == record.actions
            assert all(0.0 < g < 1.0 for g in record.gate_mean)
            assert record.mean_sigma2 > 0

    def test_invalid_mode(self, small_model_config):
        with pytest.raises(InvalidArgumentError):
            PolicyAgent(build_network(small_model_config), mode="beam")

    def test_metrics_match_raw_trajectories(self, open_maps, obs_config):
        rng = make_rng(12)
        episodes = split_episodes(open_maps, [0], count=20, max_steps=30, seed=9, split="heard")
        records = []
        for episode in episodes:
            plan = OracleAgent()
            plan.reset(episode, open_maps[episode.map_id])
            noise = [Action(int(a)) for a in rng.integers(0, 3, size=int(rng.integers(0, 4)))]
            actions = noise + plan.actions if rng.random() < 0.7 else noise + [Action.STOP]
            records.extend(evaluate(ScriptedAgent(actions), [episode], open_maps, obs_config, "heard"))

        successes = spl = sna = 0.0
        for record in records:
            cells = [(x, y) for x, y, _ in record.trajectory]
            path = sum(1 for a, b in zip(cells, cells[1:]) if a != b)
            actions = len(cells) - 1
            assert path == record.path_length
            assert actions == record.actions
            if record.success:
                successes += 1
                spl += record.geodesic / max(path, record.geodesic)
                sna += record.min_actions / max(actions, record.min_actions)

        report = compute_metrics(records)
        n = len(records)
        assert report.sr == pytest.approx(100.0 * successes / n, abs=1e-9)
        assert report.spl == pytest.approx(100.0 * spl / n, abs=1e-9)
        assert report.sna == pytest.approx(100.0 * sna / n, abs=1e-9)
        assert report.spl <= report.sr
        assert report.sna <= report.sr

    def test_random_agent_bounds(self, open_maps, obs_config, heard_episodes):
        report = compute_metrics(evaluate(RandomAgent(5), heard_episodes, open_maps, obs_config, "heard"))
        assert report.spl <= report.sr
        assert report.sna <= report.sr


class TestExport:
    """Test CSV, JSONL and SVG artifacts."""

    @pytest.fixture
    def evaluated(self, open_maps, obs_config, small_model_config):
        network = build_network(small_model_config, seed=2)
        records = []
        for split, classes in (("heard", [0, 1]), ("unheard", [5])):
            episodes = split_episodes(open_maps, classes, count=3, max_steps=15, seed=2, split=split)
            records.extend(evaluate(PolicyAgent(network), episodes, open_maps, obs_config, split))
        return records, compute_metrics(records)

    def test_files_and_headers(self, evaluated, open_maps, tmp_path):
        records, report = evaluated
        export_report(records, report, tmp_path, open_maps, svg_count=2)

        metrics = (tmp_path / "metrics.csv").read_text().splitlines()
        assert metrics[0] == ",".join(METRICS_HEADER)
        assert len(metrics) == 1 + 2

        episodes = (tmp_path / "episodes.csv").read_text().splitlines()
        assert episodes[0] == ",".join(EPISODES_HEADER)
        assert len(episodes) == 1 + len(records)

        assert len(list((tmp_path / "svg").glob("*.svg"))) == 4

    def test_svg_vertices(self, evaluated, open_maps):
        records, _ = evaluated
        record = records[0]
        svg = render_svg(record, open_maps[record.map_id])

        points = re.search(r'<polyline class="trajectory" points="([^"]*)"', svg).group(1).split()
        assert len(points) == len(record.trajectory)
        assert svg.count('class="gate"') == len(record.gate_mean)
        assert svg.count('class="wall"') == int(open_maps[record.map_id].walls.sum())

    def test_svg_wrong_map(self, evaluated, open_maps):
        records, _ = evaluated
        other = "map02_open_wide" if records[0].map_id == "map01_open" else "map01_open"
        with pytest.raises(InvalidArgumentError):
            render_svg(records[0], open_maps[other])

    def test_re_export_is_byte_identical(self, evaluated, open_maps, tmp_path):
        records, report = evaluated
        first = export_report(records, report, tmp_path / "a", open_maps, svg_count=3)
        second = export_report(records, report, tmp_path / "b", open_maps, svg_count=3)
        assert [p.name for p in first] == [p.name for p in second]
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()

    def test_read_trajectories_from_episodes_csv(self, evaluated, tmp_path):
        records, report = evaluated
        export_report(records, report, tmp_path)
        restored = read_trajectories(tmp_path / "episodes.csv")
        assert [r.model_dump() for r in restored] == [r.model_dump() for r in records]

    def test_read_trajectories_missing(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            read_trajectories(tmp_path / "episodes.csv")

    def test_undefined_sigma2_is_empty(self, open_maps, obs_config, heard_episodes, tmp_path):
        records = evaluate(OracleAgent(), heard_episodes[:1], open_maps, obs_config, "heard")
        export_report(records, compute_metrics(records), tmp_path)
        row = (tmp_path / "episodes.csv").read_text().splitlines()[1].split(",")
        assert row[EPISODES_HEADER.index("mean_sigma2")] == ""


class TestReliability:
    """Test that a checkpoint's recorded variance follows occlusion during evaluation."""

    @pytest.fixture
    def checkpoint(self, desk_maps, tmp_path):
        config = RunConfig()
        network = build_network(config.network_config(Variant.RAVN), seed=0)
        fit_config = config.probe_config()
        data = sample_probe_data(
            desk_maps, config.observation_config(), fit_config.classes, fit_config.train_samples, make_rng(0, 0)
        )
        fit_probe(network, data, fit_config)
        return save_params(network, tmp_path / "checkpoint.pt")

    @pytest.mark.slow
    def test_sigma2_rises_behind_walls(self, desk_maps, checkpoint):
        config = RunConfig()
        episodes = split_episodes(desk_maps, config.heard_classes, count=40, max_steps=40, seed=6, split="heard")
        agent = PolicyAgent(load_network(checkpoint), mode="sampled", seed=1)
        records = evaluate(agent, episodes, desk_maps, config.observation_config(), "heard")

        clear, occluded = [], []
        for record in records:
            assert len(record.sigma2) == len(record.occlusion)
            for sigma2, k in zip(record.sigma2, record.occlusion):
                if k == 0:
                    clear.append(sigma2)
                elif k >= 2:
                    occluded.append(sigma2)

        assert clear and occluded
        assert sum(occluded) / len(occluded) > sum(clear) / len(clear)

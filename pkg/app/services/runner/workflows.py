"""
Command workflows: train, eval, ablate, plot and probe.

Each workflow takes a resolved RunConfig and writes its artifacts under
`config.out_dir`.
"""

import csv
import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from app.core.exceptions import InvalidArgumentError
from app.core.logging import clear_run_context, get_logger, log_evaluation, set_run_context
from app.schemas.config import ABLATION_ORDER, RunConfig, Variant
from app.schemas.records import EpisodeRecord, MetricsReport, ProbeReport, TrainResult
from app.services.evaluation import (
    SPLITS,
    Agent,
    OracleAgent,
    PolicyAgent,
    RandomAgent,
    compute_metrics,
    evaluate,
    export_report,
    export_svgs,
    read_trajectories,
    split_episodes,
    write_metrics_csv,
)
from app.services.model import load_network
from app.services.runner.config_loader import write_resolved_config
from app.services.trainer import run_probe, train
from app.services.world import GridMap, load_map_dir

logger = get_logger("runner")

AGENTS = ("policy", "random", "oracle")
METRIC_NAMES = ("sr", "spl", "sna")


def load_maps(config: RunConfig, names: Optional[Sequence[str]] = None) -> Dict[str, GridMap]:
    return load_map_dir(Path(config.map_dir), names)


def split_classes(config: RunConfig, split: str) -> List[int]:
    return list(config.heard_classes if split == "heard" else config.unheard_classes)


def resolve_splits(split: str) -> List[str]:
    if split == "both":
        return list(SPLITS)
    if split not in SPLITS:
        raise InvalidArgumentError(f"Unknown split '{split}', expected heard, unheard or both")
    return [split]


# --- train ---

def train_run(config: RunConfig) -> TrainResult:
    set_run_context(Path(config.out_dir).name, config.variant.value)
    try:
        return train(
            config.train_config(),
            config.network_config(),
            load_maps(config, config.train_maps),
            config.observation_config(),
            config.out_dir,
            reward_config=config.reward_config(),
        )
    finally:
        clear_run_context()


# --- eval ---

def make_agent(config: RunConfig, agent: str, checkpoint: Optional[Union[str, Path]]) -> Agent:
    seed = config.resolved_eval_seed
    if agent == "random":
        return RandomAgent(seed)
    if agent == "oracle":
        return OracleAgent(seed)
    if agent != "policy":
        raise InvalidArgumentError(f"Unknown agent '{agent}', expected one of {AGENTS}")

    checkpoint = Path(checkpoint) if checkpoint else Path(config.out_dir) / "checkpoint.pt"
    return PolicyAgent(load_network(checkpoint), mode=config.eval_mode, seed=seed)


def evaluate_splits(
    config: RunConfig,
    agent: Agent,
    splits: Sequence[str],
    maps: Dict[str, GridMap],
) -> List[EpisodeRecord]:
    obs_config = config.observation_config()
    reward_config = config.reward_config()
    records: List[EpisodeRecord] = []
    for split in splits:
        episodes = split_episodes(
            maps,
            split_classes(config, split),
            config.eval_episodes,
            config.max_steps,
            config.resolved_eval_seed,
            split,
        )
        records.extend(
            evaluate(
                agent,
                episodes,
                maps,
                obs_config,
                split,
                eval_seed=config.resolved_eval_seed,
                reward_config=reward_config,
            )
        )
    return records


def eval_run(
    config: RunConfig,
    checkpoint: Optional[Union[str, Path]] = None,
    split: str = "both",
    agent: str = "policy",
    out_dir: Optional[Union[str, Path]] = None,
) -> MetricsReport:
    """Evaluate one agent and export metrics.csv, episodes.csv, trajectories and SVGs."""
    splits = resolve_splits(split)
    maps = load_maps(config, config.eval_maps)
    evaluator = make_agent(config, agent, checkpoint)

    if out_dir is None:
        out_dir = Path(config.out_dir) / ("eval" if agent == "policy" else f"eval_{agent}")

    records = evaluate_splits(config, evaluator, splits, maps)
    report = compute_metrics(records)
    export_report(records, report, out_dir, maps, config.export_svg)

    for item in report.splits:
        log_evaluation(item.split, item.episodes, item.sr, item.spl, item.sna, agent=agent)
    return report


# --- ablate ---

def variant_config(config: RunConfig, variant: Variant, seed: int) -> RunConfig:
    """Config of one ablation cell; every derived seed follows the shared seed."""
    return config.model_copy(
        update={
            "variant": variant,
            "seed": seed,
            "model_seed": None,
            "env_seed": None,
            "audio_seed": None,
            "eval_seed": None,
            "out_dir": str(Path(config.out_dir) / variant.value / f"seed_{seed}"),
        }
    ).with_seeds_resolved()


def ablate_run(config: RunConfig, variants: Sequence[Variant] = ABLATION_ORDER) -> Path:
    """
    Train and evaluate every variant on every ablation seed.

    Writes ablation.csv (one row per variant, seed-averaged split x metric
    columns), ablation_runs.csv (one row per variant and seed) and
    random_baseline.csv (uniform-random agent on the same episodes).
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    columns = [f"{split}_{metric}" for split in SPLITS for metric in METRIC_NAMES]

    runs: List[List] = []
    means: Dict[Variant, Dict[str, float]] = {}
    for variant in variants:
        totals = {column: 0.0 for column in columns}
        for seed in config.ablation_seeds:
            cell = variant_config(config, variant, seed)
            write_resolved_config(cell)
            logger.info(
                f"Ablation: {variant.value} seed {seed}",
                extra={"variant": variant.value, "seed": seed},
            )
            result = train_run(cell)
            report = eval_run(cell, checkpoint=result.checkpoint_path)

            row = [variant.value, seed]
            for split in SPLITS:
                item = report.split(split)
                for metric in METRIC_NAMES:
                    value = getattr(item, metric)
                    totals[f"{split}_{metric}"] += value
                    row.append(f"{value:.4f}")
            runs.append(row)
        means[variant] = {c: totals[c] / len(config.ablation_seeds) for c in columns}

    with open(out_dir / "ablation_runs.csv", "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["variant", "seed", *columns])
        writer.writerows(runs)

    ablation_path = out_dir / "ablation.csv"
    with open(ablation_path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["variant", *columns])
        for variant in variants:
            writer.writerow([variant.value, *(f"{means[variant][c]:.4f}" for c in columns)])

    reference = variant_config(config, variants[0], config.ablation_seeds[0])
    random_records = evaluate_splits(
        reference,
        RandomAgent(reference.resolved_eval_seed),
        SPLITS,
        load_maps(reference, reference.eval_maps),
    )
    write_metrics_csv(compute_metrics(random_records), out_dir / "random_baseline.csv")

    logger.info(f"Ablation table written to {ablation_path}", extra={"path": str(ablation_path)})
    return ablation_path


# --- plot ---

def plot_run(
    records_path: Union[str, Path],
    maps_dir: Union[str, Path],
    out_dir: Union[str, Path],
) -> List[Path]:
    """Re-render SVGs from a stored evaluation."""
    records = read_trajectories(records_path)
    maps = load_map_dir(Path(maps_dir))
    written = export_svgs(records, maps, Path(out_dir))
    logger.info(f"Rendered {len(written)} trajectories", extra={"count": len(written)})
    return written


# --- probe ---

def probe_run(config: RunConfig) -> ProbeReport:
    report = run_probe(
        load_maps(config, config.train_maps),
        config.observation_config(),
        config.network_config(Variant.AGR_NLL),
        config.probe_config(),
    )
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "probe.json").write_text(
        json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
    )
    return report

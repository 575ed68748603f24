#!/usr/bin/env python3
"""
RAVN testbed CLI - train, evaluate and compare reliability-aware navigation agents.

Usage:
    python cli.py train --config configs/desk.json
    python cli.py eval --config configs/desk.json --checkpoint runs/desk/checkpoint.pt --split both
    python cli.py eval --config configs/desk.json --agent oracle
    python cli.py ablate --config configs/desk.json
    python cli.py plot --records runs/desk/eval/episodes.csv --maps test-data/maps --out runs/desk/svg
    python cli.py probe --config configs/desk.json

RAVN_SEED overrides the configured seed when set.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from app.core.config import get_settings
from app.core.exceptions import RavnError
from app.core.logging import log_error, setup_logging
from app.core.reproducibility import configure_torch


def _load(args):
    from app.services.runner import load_config

    return load_config(args.config)


def cmd_train(args) -> int:
    """Train one variant."""
    from app.services.runner import train_run

    config = _load(args)
    result = train_run(config)

    print(f"Trained {config.variant.value}: {result.updates} updates, {result.steps} steps")
    print(f"Checkpoint: {result.checkpoint_path}")
    print(f"Log:        {result.log_path}")
    return 0


def cmd_eval(args) -> int:
    """Evaluate a checkpoint (or a reference agent) on heard/unheard splits."""
    from app.services.runner import eval_run

    config = _load(args)
    report = eval_run(config, checkpoint=args.checkpoint, split=args.split, agent=args.agent)

    print(f"{'split':<10} {'episodes':>8} {'SR':>7} {'SPL':>7} {'SNA':>7}")
    for item in report.splits:
        print(f"{item.split:<10} {item.episodes:>8} {item.sr:>7.2f} {item.spl:>7.2f} {item.sna:>7.2f}")
    return 0


def cmd_ablate(args) -> int:
    """Train and evaluate all four variants with shared seeds."""
    from app.services.runner import ablate_run

    path = ablate_run(_load(args))
    print(f"Ablation table: {path}")
    return 0


def cmd_plot(args) -> int:
    """Render SVG trajectories from a stored evaluation."""
    from app.services.runner import plot_run

    written = plot_run(args.records, args.maps, args.out)
    print(f"Wrote {len(written)} SVG files to {Path(args.out) / 'svg'}")
    return 0


def cmd_probe(args) -> int:
    """Supervised reliability probe of the geometry reasoner."""
    from app.services.runner import probe_run

    report = probe_run(_load(args))
    print(f"Spearman(sigma^2, occlusion): {report.spearman_sigma2_occlusion:.3f}")
    print(f"Held-out NLL: {report.heldout_nll:.4f} (best constant variance {report.constant_nll:.4f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="RAVN - reliability-aware audio-visual navigation testbed"
    )
    subparsers = parser.add_subparsers(dest="command", help="Commands")
    subparsers.required = True

    # train command
    train_parser = subparsers.add_parser("train", help="Train one variant")
    train_parser.add_argument("--config", "-c", required=True, help="Path to run config JSON")
    train_parser.set_defaults(func=cmd_train)

    # eval command
    eval_parser = subparsers.add_parser("eval", help="Evaluate a checkpoint")
    eval_parser.add_argument("--config", "-c", required=True, help="Path to run config JSON")
    eval_parser.add_argument(
        "--checkpoint", "-k",
        help="Checkpoint file (default: <out_dir>/checkpoint.pt)"
    )
    eval_parser.add_argument(
        "--split", "-s",
        choices=["heard", "unheard", "both"],
        default="both",
        help="Sound-class split to evaluate"
    )
    eval_parser.add_argument(
        "--agent", "-a",
        choices=["policy", "random", "oracle"],
        default="policy",
        help="Agent to evaluate (random and oracle need no checkpoint)"
    )
    eval_parser.set_defaults(func=cmd_eval)

    # ablate command
    ablate_parser = subparsers.add_parser("ablate", help="Run the four-variant ablation")
    ablate_parser.add_argument("--config", "-c", required=True, help="Path to run config JSON")
    ablate_parser.set_defaults(func=cmd_ablate)

    # plot command
    plot_parser = subparsers.add_parser("plot", help="Render trajectories as SVG")
    plot_parser.add_argument(
        "--records", "-r",
        required=True,
        help="episodes.csv or trajectories.jsonl of a stored evaluation"
    )
    plot_parser.add_argument("--maps", "-m", required=True, help="Map directory")
    plot_parser.add_argument("--out", "-o", required=True, help="Output directory")
    plot_parser.set_defaults(func=cmd_plot)

    # probe command
    probe_parser = subparsers.add_parser("probe", help="Supervised reliability probe")
    probe_parser.add_argument("--config", "-c", required=True, help="Path to run config JSON")
    probe_parser.set_defaults(func=cmd_probe)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        settings = get_settings()
        setup_logging(settings)
        configure_torch(settings.torch_threads)
        return args.func(args)
    except RavnError as e:
        log_error(e, f"{args.command} failed")
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        log_error(e, f"{args.command} crashed")
        print(f"Unexpected error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

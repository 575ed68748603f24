"""Frozen-policy evaluation, SR/SPL/SNA metrics and report export."""

from app.services.evaluation.agents import (
    Agent,
    Decision,
    OracleAgent,
    PolicyAgent,
    RandomAgent,
    ScriptedAgent,
)
from app.services.evaluation.evaluator import SPLITS, evaluate, split_episodes
from app.services.evaluation.export import (
    CELL_PX,
    EPISODES_HEADER,
    METRICS_HEADER,
    export_report,
    export_svgs,
    read_trajectories,
    render_svg,
    write_episodes_csv,
    write_metrics_csv,
    write_trajectories,
)
from app.services.evaluation.metrics import compute_metrics, sna_term, spl_term, summarize

__all__ = [
    "Agent",
    "CELL_PX",
    "Decision",
    "EPISODES_HEADER",
    "METRICS_HEADER",
    "OracleAgent",
    "PolicyAgent",
    "RandomAgent",
    "SPLITS",
    "ScriptedAgent",
    "compute_metrics",
    "evaluate",
    "export_report",
    "export_svgs",
    "read_trajectories",
    "render_svg",
    "sna_term",
    "spl_term",
    "split_episodes",
    "summarize",
    "write_episodes_csv",
    "write_metrics_csv",
    "write_trajectories",
]

"""SR, SPL and SNA over episode records."""

from typing import Dict, List, Sequence

from app.core.exceptions import InvalidArgumentError
from app.schemas.records import EpisodeRecord, MetricsReport, SplitMetrics


def spl_term(record: EpisodeRecord) -> float:
    if not record.success:
        return 0.0
    return record.geodesic / max(record.path_length, record.geodesic)


def sna_term(record: EpisodeRecord) -> float:
    if not record.success:
        return 0.0
    return record.min_actions / max(record.actions, record.min_actions)


def summarize(split: str, records: Sequence[EpisodeRecord]) -> SplitMetrics:
    n = len(records)
    return SplitMetrics(
        split=split,
        episodes=n,
        sr=100.0 * sum(1.0 if r.success else 0.0 for r in records) / n,
        spl=100.0 * sum(spl_term(r) for r in records) / n,
        sna=100.0 * sum(sna_term(r) for r in records) / n,
    )


def compute_metrics(records: Sequence[EpisodeRecord]) -> MetricsReport:
    """Overall metrics plus one breakdown per split, splits in order of first appearance."""
    if not records:
        raise InvalidArgumentError("compute_metrics needs at least one episode record")

    by_split: Dict[str, List[EpisodeRecord]] = {}
    for record in records:
        by_split.setdefault(record.split, []).append(record)

    overall = summarize("all", records)
    return MetricsReport(
        episodes=overall.episodes,
        sr=overall.sr,
        spl=overall.spl,
        sna=overall.sna,
        splits=[summarize(split, items) for split, items in by_split.items()],
    )

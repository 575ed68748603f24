"""Records that cross a file boundary: losses, episodes, metrics, probe results."""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, computed_field


# --- Losses ---

class LossBreakdown(BaseModel):
    """Scalar loss terms of one update. Aux terms are None for the baseline."""
    l_dist: Optional[float] = None
    l_ang: Optional[float] = None
    l_aux: Optional[float] = None
    l_ppo_policy: float
    l_value: float
    l_entropy: float
    l_total: float

    @classmethod
    def average(cls, items: List["LossBreakdown"]) -> "LossBreakdown":
        """Field-wise mean in list order."""
        if not items:
            raise ValueError("cannot average an empty list of loss breakdowns")

        def mean(name: str) -> Optional[float]:
            values = [getattr(item, name) for item in items]
            if any(v is None for v in values):
                return None
            return sum(values) / len(values)

        return cls(**{name: mean(name) for name in cls.model_fields})


# --- Episodes ---

PoseTuple = Tuple[int, int, int]


class EpisodeRecord(BaseModel):
    """Outcome and per-step trace of one evaluated episode."""
    episode_id: int
    split: str
    map_id: str
    sound_class: int
    start: PoseTuple
    goal: Tuple[int, int]
    success: bool
    geodesic: int = Field(..., ge=0)
    path_length: int = Field(..., ge=0)
    actions: int = Field(..., ge=1)
    min_actions: int = Field(..., ge=1)
    trajectory: List[PoseTuple] = []
    # Per-step reliability trace, one entry per action taken.
    sigma2: List[float] = []
    gate_mean: List[float] = []
    occlusion: List[int] = []

    @computed_field
    @property
    def mean_sigma2(self) -> Optional[float]:
        return sum(self.sigma2) / len(self.sigma2) if self.sigma2 else None

    @computed_field
    @property
    def mean_occlusion(self) -> float:
        return sum(self.occlusion) / len(self.occlusion) if self.occlusion else 0.0


# --- Metrics ---

class SplitMetrics(BaseModel):
    split: str
    episodes: int
    sr: float = Field(..., ge=0, le=100)
    spl: float = Field(..., ge=0, le=100)
    sna: float = Field(..., ge=0, le=100)


class MetricsReport(BaseModel):
    """SR / SPL / SNA in percent, overall and per split."""
    episodes: int
    sr: float = Field(..., ge=0, le=100)
    spl: float = Field(..., ge=0, le=100)
    sna: float = Field(..., ge=0, le=100)
    splits: List[SplitMetrics] = []

    def split(self, name: str) -> Optional[SplitMetrics]:
        for item in self.splits:
            if item.split == name:
                return item
        return None


# --- Training / probe ---

class TrainResult(BaseModel):
    checkpoint_path: str
    log_path: str
    episodes_path: str
    updates: int
    steps: int
    sr_recent: Optional[float] = None


class ProbeReport(BaseModel):
    """Held-out reliability statistics of a supervised geometry probe."""
    train_samples: int
    eval_samples: int
    spearman_sigma2_occlusion: float
    heldout_nll: float
    constant_nll: float
    constant_log_var: float
    mean_sigma2_by_occlusion: Dict[int, float] = {}

    @computed_field
    @property
    def beats_constant(self) -> bool:
        return self.heldout_nll < self.constant_nll

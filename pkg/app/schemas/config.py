"""Experiment configuration schemas."""

from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Variant(str, Enum):
    """Network variants of the ablation ladder, weakest first."""
    BASELINE = "baseline"
    AGR_MSE = "agr_mse"
    AGR_NLL = "agr_nll"
    RAVN = "ravn"

    @property
    def has_agr(self) -> bool:
        return self is not Variant.BASELINE

    @property
    def uses_nll(self) -> bool:
        return self in (Variant.AGR_NLL, Variant.RAVN)

    @property
    def has_gate(self) -> bool:
        return self is Variant.RAVN


ABLATION_ORDER = [Variant.BASELINE, Variant.AGR_MSE, Variant.AGR_NLL, Variant.RAVN]


# --- Derived views ---

class ObservationConfig(BaseModel):
    """Sizes and noise constants of the synthetic observation."""
    model_config = ConfigDict(frozen=True)

    spectrum_bins: int = Field(16, gt=0)          # F
    depth_rays: int = Field(9, gt=0)              # R
    d_max: float = Field(32.0, gt=0)              # cells
    fov_deg: float = Field(90.0, gt=0, le=360)
    depth_range: float = Field(10.0, gt=0)        # cells
    depth_step: float = Field(0.1, gt=0)          # cells
    azimuth_noise_base: float = Field(0.1, ge=0)
    azimuth_noise_slope: float = Field(0.4, ge=0)
    occlusion_cap: int = Field(3, ge=0)
    spectral_noise_base: float = Field(0.02, ge=0)
    spectral_noise_slope: float = Field(0.02, ge=0)
    audio_seed: int = 0

    def noiseless(self) -> "ObservationConfig":
        return self.model_copy(
            update={
                "azimuth_noise_base": 0.0,
                "azimuth_noise_slope": 0.0,
                "spectral_noise_base": 0.0,
                "spectral_noise_slope": 0.0,
            }
        )


class RewardConfig(BaseModel):
    """Reward shaping constants."""
    model_config = ConfigDict(frozen=True)

    progress_weight: float = 1.0
    step_penalty: float = 0.01
    success_reward: float = 10.0


class ModelConfig(BaseModel):
    """Network sizes and variant."""
    model_config = ConfigDict(frozen=True)

    spectrum_bins: int = Field(16, gt=0)   # F
    depth_rays: int = Field(9, gt=0)       # R
    audio_dim: int = Field(32, gt=0)       # D_a
    visual_dim: int = Field(32, gt=0)      # D_v
    geo_dim: int = Field(32, gt=0)         # D_g
    hidden_dim: int = Field(64, gt=0)      # H
    gate_hidden: int = Field(32, gt=0)
    variant: Variant = Variant.RAVN
    log_var_min: float = -6.0
    log_var_max: float = 6.0

    @property
    def audio_input(self) -> int:
        return 2 * self.spectrum_bins

    @model_validator(mode="after")
    def _check_bounds(self):
        if self.log_var_min >= self.log_var_max:
            raise ValueError("log_var_min must be below log_var_max")
        return self


class TrainConfig(BaseModel):
    """Everything the PPO loop needs."""
    model_config = ConfigDict(frozen=True, protected_namespaces=())

    total_steps: int = Field(2_000_000, gt=0)
    rollout_length: int = Field(128, gt=0)   # T
    num_envs: int = Field(8, gt=0)           # K
    gamma: float = Field(0.99, ge=0, le=1)
    gae_lambda: float = Field(0.95, ge=0, le=1)
    ppo_epochs: int = Field(4, gt=0)
    minibatches: int = Field(4, gt=0)
    learning_rate: float = Field(2.5e-4, ge=0)
    adam_eps: float = Field(1e-5, gt=0)
    lambda_aux: float = Field(0.5, ge=0)
    clip_eps: float = Field(0.2, gt=0)
    value_coef: float = Field(0.5, ge=0)
    entropy_coef: float = Field(0.01, ge=0)
    max_grad_norm: float = Field(0.5, gt=0)
    max_steps: int = Field(500, gt=0)
    checkpoint_interval: int = Field(50, gt=0)
    model_seed: int = 1
    env_seed: int = 2
    heard_classes: List[int] = Field(default_factory=lambda: list(range(8)))
    unheard_classes: List[int] = Field(default_factory=lambda: list(range(8, 12)))
    variant: Variant = Variant.RAVN

    @property
    def steps_per_update(self) -> int:
        return self.rollout_length * self.num_envs

    @model_validator(mode="after")
    def _check_split(self):
        overlap = set(self.heard_classes) & set(self.unheard_classes)
        if overlap:
            raise ValueError(f"heard and unheard classes overlap: {sorted(overlap)}")
        if not self.heard_classes:
            raise ValueError("at least one heard class is required")
        return self


class ProbeConfig(BaseModel):
    """Supervised reliability probe: data sizes and optimiser settings."""
    model_config = ConfigDict(frozen=True)

    train_samples: int = Field(10_000, gt=0)
    eval_samples: int = Field(2_000, gt=0)
    epochs: int = Field(30, gt=0)
    batch_size: int = Field(256, gt=0)
    learning_rate: float = Field(1e-3, gt=0)
    seed: int = 0
    classes: List[int] = Field(default_factory=lambda: list(range(8)))


# --- Run configuration (the JSON document) ---

class RunConfig(BaseModel):
    """
    Fully-resolved experiment configuration.

    Flat on purpose: every key in the JSON file maps to exactly one field here,
    unknown keys are rejected and missing keys take the defaults below.
    """
    model_config = ConfigDict(extra="forbid", frozen=True, protected_namespaces=())

    # Run
    variant: Variant = Variant.RAVN
    seed: int = Field(0, ge=0)
    model_seed: Optional[int] = Field(None, ge=0)
    env_seed: Optional[int] = Field(None, ge=0)
    audio_seed: Optional[int] = Field(None, ge=0)
    eval_seed: Optional[int] = Field(None, ge=0)
    map_dir: str = "test-data/maps"
    out_dir: str = "runs/default"
    train_maps: Optional[List[str]] = None
    eval_maps: Optional[List[str]] = None

    # Sound classes
    num_classes: int = Field(12, gt=0)
    heard_classes: List[int] = Field(default_factory=lambda: list(range(8)))
    unheard_classes: List[int] = Field(default_factory=lambda: list(range(8, 12)))

    # Observation
    spectrum_bins: int = Field(16, gt=0)
    depth_rays: int = Field(9, gt=0)
    d_max: float = Field(32.0, gt=0)
    fov_deg: float = Field(90.0, gt=0, le=360)
    depth_range: float = Field(10.0, gt=0)
    depth_step: float = Field(0.1, gt=0)
    azimuth_noise_base: float = Field(0.1, ge=0)
    azimuth_noise_slope: float = Field(0.4, ge=0)
    occlusion_cap: int = Field(3, ge=0)
    spectral_noise_base: float = Field(0.02, ge=0)
    spectral_noise_slope: float = Field(0.02, ge=0)

    # Environment
    max_steps: int = Field(500, gt=0)
    reward_progress: float = 1.0
    reward_step_penalty: float = 0.01
    reward_success: float = 10.0

    # Network
    audio_dim: int = Field(32, gt=0)
    visual_dim: int = Field(32, gt=0)
    geo_dim: int = Field(32, gt=0)
    hidden_dim: int = Field(64, gt=0)
    gate_hidden: int = Field(32, gt=0)
    log_var_min: float = -6.0
    log_var_max: float = 6.0

    # PPO
    total_steps: int = Field(2_000_000, gt=0)
    rollout_length: int = Field(128, gt=0)
    num_envs: int = Field(8, gt=0)
    gamma: float = Field(0.99, ge=0, le=1)
    gae_lambda: float = Field(0.95, ge=0, le=1)
    ppo_epochs: int = Field(4, gt=0)
    minibatches: int = Field(4, gt=0)
    learning_rate: float = Field(2.5e-4, ge=0)
    adam_eps: float = Field(1e-5, gt=0)
    lambda_aux: float = Field(0.5, ge=0)
    clip_eps: float = Field(0.2, gt=0)
    value_coef: float = Field(0.5, ge=0)
    entropy_coef: float = Field(0.01, ge=0)
    max_grad_norm: float = Field(0.5, gt=0)
    checkpoint_interval: int = Field(50, gt=0)

    # Evaluation
    eval_episodes: int = Field(200, gt=0)
    eval_mode: Literal["greedy", "sampled"] = "greedy"
    export_svg: int = Field(5, ge=0)

    # Ablation
    ablation_seeds: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1)

    # Supervised probe
    probe_train_samples: int = Field(10_000, gt=0)
    probe_eval_samples: int = Field(2_000, gt=0)
    probe_epochs: int = Field(30, gt=0)
    probe_batch_size: int = Field(256, gt=0)
    probe_learning_rate: float = Field(1e-3, gt=0)

    @field_validator("heard_classes", "unheard_classes")
    @classmethod
    def _non_negative(cls, value: List[int]) -> List[int]:
        if any(c < 0 for c in value):
            raise ValueError("class ids must be non-negative")
        return value

    @model_validator(mode="after")
    def _check_classes(self):
        overlap = set(self.heard_classes) & set(self.unheard_classes)
        if overlap:
            raise ValueError(f"heard and unheard classes overlap: {sorted(overlap)}")
        if not self.heard_classes or not self.unheard_classes:
            raise ValueError("heard and unheard classes must both be non-empty")
        out_of_range = [c for c in self.heard_classes + self.unheard_classes if c >= self.num_classes]
        if out_of_range:
            raise ValueError(f"class ids {out_of_range} are outside [0, {self.num_classes})")
        if self.log_var_min >= self.log_var_max:
            raise ValueError("log_var_min must be below log_var_max")
        return self

    # --- seeds ---

    def with_seeds_resolved(self, seed_override: Optional[int] = None) -> "RunConfig":
        """Return a copy with every derived seed written out explicitly."""
        seed = self.seed if seed_override is None else seed_override
        return self.model_copy(
            update={
                "seed": seed,
                "model_seed": self.model_seed if self.model_seed is not None else seed + 1,
                "env_seed": self.env_seed if self.env_seed is not None else seed + 2,
                "audio_seed": self.audio_seed if self.audio_seed is not None else seed + 3,
                "eval_seed": self.eval_seed if self.eval_seed is not None else seed + 4,
            }
        )

    def _seed(self, value: Optional[int], offset: int) -> int:
        return value if value is not None else self.seed + offset

    # --- derived views ---

    def observation_config(self) -> ObservationConfig:
        return ObservationConfig(
            spectrum_bins=self.spectrum_bins,
            depth_rays=self.depth_rays,
            d_max=self.d_max,
            fov_deg=self.fov_deg,
            depth_range=self.depth_range,
            depth_step=self.depth_step,
            azimuth_noise_base=self.azimuth_noise_base,
            azimuth_noise_slope=self.azimuth_noise_slope,
            occlusion_cap=self.occlusion_cap,
            spectral_noise_base=self.spectral_noise_base,
            spectral_noise_slope=self.spectral_noise_slope,
            audio_seed=self._seed(self.audio_seed, 3),
        )

    def reward_config(self) -> RewardConfig:
        return RewardConfig(
            progress_weight=self.reward_progress,
            step_penalty=self.reward_step_penalty,
            success_reward=self.reward_success,
        )

    def network_config(self, variant: Optional[Variant] = None) -> ModelConfig:
        return ModelConfig(
            spectrum_bins=self.spectrum_bins,
            depth_rays=self.depth_rays,
            audio_dim=self.audio_dim,
            visual_dim=self.visual_dim,
            geo_dim=self.geo_dim,
            hidden_dim=self.hidden_dim,
            gate_hidden=self.gate_hidden,
            variant=variant or self.variant,
            log_var_min=self.log_var_min,
            log_var_max=self.log_var_max,
        )

    def train_config(self, variant: Optional[Variant] = None) -> TrainConfig:
        return TrainConfig(
            total_steps=self.total_steps,
            rollout_length=self.rollout_length,
            num_envs=self.num_envs,
            gamma=self.gamma,
            gae_lambda=self.gae_lambda,
            ppo_epochs=self.ppo_epochs,
            minibatches=self.minibatches,
            learning_rate=self.learning_rate,
            adam_eps=self.adam_eps,
            lambda_aux=self.lambda_aux,
            clip_eps=self.clip_eps,
            value_coef=self.value_coef,
            entropy_coef=self.entropy_coef,
            max_grad_norm=self.max_grad_norm,
            max_steps=self.max_steps,
            checkpoint_interval=self.checkpoint_interval,
            model_seed=self._seed(self.model_seed, 1),
            env_seed=self._seed(self.env_seed, 2),
            heard_classes=list(self.heard_classes),
            unheard_classes=list(self.unheard_classes),
            variant=variant or self.variant,
        )

    def probe_config(self) -> ProbeConfig:
        return ProbeConfig(
            train_samples=self.probe_train_samples,
            eval_samples=self.probe_eval_samples,
            epochs=self.probe_epochs,
            batch_size=self.probe_batch_size,
            learning_rate=self.probe_learning_rate,
            seed=self._seed(self.model_seed, 1),
            classes=list(self.heard_classes),
        )

    @property
    def resolved_eval_seed(self) -> int:
        return self._seed(self.eval_seed, 4)

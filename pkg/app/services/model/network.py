"""
RAVN network.

Audio and visual perceptron encoders, the acoustic geometry reasoner (shared
encoder with distance, azimuth and projection heads), the reliability gate
over visual features and a single GRU cell feeding actor and critic heads.
The variant decides which of the optional submodules exist.

All methods take batched tensors of shape (B, dim).
"""

from dataclasses import dataclass
from typing import Optional

import torch
from torch import nn

from app.core.exceptions import ConfigurationError, ShapeError
from app.core.reproducibility import seed_model_init
from app.schemas.config import ModelConfig
from app.services.losses import wrap_angle
from app.services.world import NUM_ACTIONS


@dataclass
class AgrOutput:
    z_geo: torch.Tensor      # (B, D_g)
    g_t: torch.Tensor        # (B, D_v)
    mu: torch.Tensor         # (B,)
    log_var: torch.Tensor    # (B,) clamped
    phi_hat: torch.Tensor    # (B,) wrapped to (-pi, pi]

    @property
    def sigma2(self) -> torch.Tensor:
        return torch.exp(self.log_var)


@dataclass
class PolicyOutput:
    s_t: torch.Tensor
    h_t: torch.Tensor
    logits: torch.Tensor     # (B, 4)
    value: torch.Tensor      # (B,)


@dataclass
class StepOutput:
    """Everything one full forward step produces."""
    policy: PolicyOutput
    agr: Optional[AgrOutput] = None
    mask: Optional[torch.Tensor] = None


def perceptron(in_dim: int, out_dim: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Linear(in_dim, out_dim),
        nn.Tanh(),
        nn.Linear(out_dim, out_dim),
        nn.Tanh(),
    )


class AcousticGeometryReasoner(nn.Module):
    """Audio features -> latent geometry, distance Gaussian, azimuth and visual-aligned g_t."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.log_var_min = config.log_var_min
        self.log_var_max = config.log_var_max

        self.encoder = nn.Sequential(nn.Linear(config.audio_dim, config.geo_dim), nn.Tanh())
        self.distance_head = nn.Linear(config.geo_dim, 2)    # mu, log_var
        self.azimuth_head = nn.Linear(config.geo_dim, 1)
        self.projection = nn.Linear(config.geo_dim, config.visual_dim)

    def forward(self, f_a: torch.Tensor) -> AgrOutput:
        z_geo = self.encoder(f_a)
        dist = self.distance_head(z_geo)
        return AgrOutput(
            z_geo=z_geo,
            g_t=self.projection(z_geo),
            mu=dist[:, 0],
            log_var=torch.clamp(dist[:, 1], self.log_var_min, self.log_var_max),
            phi_hat=wrap_angle(self.azimuth_head(z_geo)[:, 0]),
        )


class ReliabilityGate(nn.Module):
    """m_t = sigmoid(MLP(g_t)), one hidden layer."""

    def __init__(self, visual_dim: int, hidden: int):
        super().__init__()
        self.mlp = nn.Sequential(
            nn.Linear(visual_dim, hidden),
            nn.Tanh(),
            nn.Linear(hidden, visual_dim),
        )

    def forward(self, g_t: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.mlp(g_t))


class RavnNetwork(nn.Module):
    """
    Recurrent actor-critic with optional geometry reasoning and gating.

    baseline: no reasoner, no gate. agr_mse / agr_nll: reasoner trained by an
    auxiliary loss, visual features unmodulated. ravn: reasoner plus gate.
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.variant = config.variant

        self.audio_encoder = perceptron(config.audio_input, config.audio_dim)
        self.visual_encoder = perceptron(config.depth_rays, config.visual_dim)

        self.agr = AcousticGeometryReasoner(config) if config.variant.has_agr else None
        self.gate = (
            ReliabilityGate(config.visual_dim, config.gate_hidden)
            if config.variant.has_gate
            else None
        )

        self.gru = nn.GRUCell(config.audio_dim + config.visual_dim, config.hidden_dim)
        self.actor = nn.Linear(config.hidden_dim, NUM_ACTIONS)
        self.critic = nn.Linear(config.hidden_dim, 1)

    @property
    def hidden_dim(self) -> int:
        return self.config.hidden_dim

    def initial_state(self, batch: int = 1, dtype: Optional[torch.dtype] = None) -> torch.Tensor:
        dtype = dtype or self.actor.weight.dtype
        return torch.zeros(batch, self.config.hidden_dim, dtype=dtype)

    # --- submodules ---

    def encode_audio(self, spectrum: torch.Tensor) -> torch.Tensor:
        _check_last_dim("audio observation", spectrum, self.config.audio_input)
        return self.audio_encoder(spectrum)

    def encode_visual(self, depths: torch.Tensor) -> torch.Tensor:
        _check_last_dim("visual observation", depths, self.config.depth_rays)
        return self.visual_encoder(depths)

    def agr_forward(self, f_a: torch.Tensor) -> AgrOutput:
        if self.agr is None:
            raise ConfigurationError(
                "agr_forward called on a network without a geometry reasoner",
                {"variant": self.variant.value},
            )
        _check_last_dim("audio features", f_a, self.config.audio_dim)
        return self.agr(f_a)

    def ragm_modulate(
        self,
        f_v: torch.Tensor,
        g_t: torch.Tensor,
        mask_override: Optional[torch.Tensor] = None,
    ):
        """
        Gate visual features by m_t. Returns (m_t, f_v * m_t).

        mask_override replaces the computed mask; tests use it to pin the gate.
        """
        if self.gate is None:
            raise ConfigurationError(
                "ragm_modulate called on a network without a reliability gate",
                {"variant": self.variant.value},
            )
        _check_last_dim("visual features", f_v, self.config.visual_dim)
        _check_last_dim("projected geometry", g_t, self.config.visual_dim)

        m_t = self.gate(g_t) if mask_override is None else mask_override.expand_as(f_v)
        return m_t, f_v * m_t

    def policy_step(
        self,
        f_a: torch.Tensor,
        f_v_eff: torch.Tensor,
        h_prev: torch.Tensor,
    ) -> PolicyOutput:
        _check_last_dim("audio features", f_a, self.config.audio_dim)
        _check_last_dim("visual features", f_v_eff, self.config.visual_dim)
        _check_last_dim("hidden state", h_prev, self.config.hidden_dim)

        x_t = torch.cat([f_a, f_v_eff], dim=-1)
        s_t = self.gru(x_t, h_prev)
        return PolicyOutput(
            s_t=s_t,
            h_t=s_t,
            logits=self.actor(s_t),
            value=self.critic(s_t)[:, 0],
        )

    # --- full step ---

    def forward(
        self,
        spectrum: torch.Tensor,
        depths: torch.Tensor,
        h_prev: torch.Tensor,
        mask_override: Optional[torch.Tensor] = None,
    ) -> StepOutput:
        f_a = self.encode_audio(spectrum)
        f_v = self.encode_visual(depths)

        agr = self.agr_forward(f_a) if self.agr is not None else None
        mask = None
        f_v_eff = f_v
        if self.gate is not None:
            mask, f_v_eff = self.ragm_modulate(f_v, agr.g_t, mask_override)
        elif mask_override is not None:
            raise ConfigurationError(
                "mask_override given to a network without a reliability gate",
                {"variant": self.variant.value},
            )

        return StepOutput(policy=self.policy_step(f_a, f_v_eff, h_prev), agr=agr, mask=mask)


def build_network(config: ModelConfig, seed: Optional[int] = None) -> RavnNetwork:
    """Construct a network, optionally with seeded initialisation."""
    if seed is not None:
        seed_model_init(seed)
    return RavnNetwork(config)


def _check_last_dim(name: str, tensor: torch.Tensor, expected: int):
    if tensor.dim() != 2 or tensor.shape[-1] != expected:
        raise ShapeError(
            f"{name} must have shape (batch, {expected}), got {tuple(tensor.shape)}",
            {"expected": expected, "shape": list(tensor.shape)},
        )


__all__ = [
    "AcousticGeometryReasoner",
    "AgrOutput",
    "PolicyOutput",
    "RavnNetwork",
    "ReliabilityGate",
    "StepOutput",
    "build_network",
]

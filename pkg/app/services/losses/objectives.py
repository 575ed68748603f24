"""
Training objectives.

Heteroscedastic distance NLL, wrapped Smooth-L1 azimuth loss, their
aggregate, the PPO clipped surrogate and the weighted total. All functions
are pure and work on batched tensors, reducing with a mean in a fixed order.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import torch
import torch.nn.functional as F
from torch.distributions import Categorical

from app.core.exceptions import InvalidArgumentError
from app.schemas.config import Variant
from app.schemas.records import LossBreakdown

TWO_PI = 2.0 * math.pi
SMOOTH_L1_BETA = 1.0

Number = Union[float, torch.Tensor]


def wrap_angle(x: Number) -> Number:
    """Wrap to (-pi, pi]; the boundary -pi maps to +pi."""
    if not isinstance(x, torch.Tensor):
        y = x - TWO_PI * math.floor((x + math.pi) / TWO_PI)
        if y <= -math.pi:
            y += TWO_PI
        elif y > math.pi:
            y -= TWO_PI
        return y

    y = x - TWO_PI * torch.floor((x + math.pi) / TWO_PI)
    y = torch.where(y <= -math.pi, y + TWO_PI, y)
    return torch.where(y > math.pi, y - TWO_PI, y)


def dist_nll(mu: torch.Tensor, log_var: torch.Tensor, y_dist: torch.Tensor) -> torch.Tensor:
    """Gaussian NLL with sigma^2 = exp(log_var), constant term dropped."""
    return 0.5 * log_var + (y_dist - mu) ** 2 / (2.0 * torch.exp(log_var))


def dist_mse(mu: torch.Tensor, y_dist: torch.Tensor) -> torch.Tensor:
    return (y_dist - mu) ** 2


def ang_loss(phi_hat: torch.Tensor, y_ang: torch.Tensor) -> torch.Tensor:
    error = wrap_angle(phi_hat - y_ang)
    return F.smooth_l1_loss(error, torch.zeros_like(error), beta=SMOOTH_L1_BETA, reduction="none")


@dataclass
class PPOTerms:
    policy: torch.Tensor
    value: torch.Tensor
    entropy: torch.Tensor


def ppo_loss(
    logits: torch.Tensor,
    actions: torch.Tensor,
    old_log_probs: torch.Tensor,
    advantages: torch.Tensor,
    values: torch.Tensor,
    returns: torch.Tensor,
    clip_eps: float = 0.2,
) -> PPOTerms:
    """
    Clipped surrogate, value regression and negative entropy.

    Advantages are used as given; normalisation happens once per update batch
    in the trainer.
    """
    if actions.numel() == 0:
        raise InvalidArgumentError("ppo_loss needs at least one transition")

    dist = Categorical(logits=logits)
    log_probs = dist.log_prob(actions)
    ratio = torch.exp(log_probs - old_log_probs)

    unclipped = ratio * advantages
    clipped = torch.clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * advantages

    return PPOTerms(
        policy=-torch.min(unclipped, clipped).mean(),
        value=((values - returns) ** 2).mean(),
        entropy=-dist.entropy().mean(),
    )


@dataclass
class TotalLoss:
    """Differentiable total plus the detached breakdown."""
    total: torch.Tensor
    breakdown: LossBreakdown


def aux_terms(
    variant: Variant,
    mu: Optional[torch.Tensor],
    log_var: Optional[torch.Tensor],
    phi_hat: Optional[torch.Tensor],
    y_dist: Optional[torch.Tensor],
    y_ang: Optional[torch.Tensor],
):
    """(l_dist, l_ang) means for the variant, or (None, None) for the baseline."""
    if not variant.has_agr:
        return None, None
    if variant.uses_nll:
        l_dist = dist_nll(mu, log_var, y_dist).mean()
    else:
        l_dist = dist_mse(mu, y_dist).mean()
    return l_dist, ang_loss(phi_hat, y_ang).mean()


def total_loss(
    ppo: PPOTerms,
    l_dist: Optional[torch.Tensor],
    l_ang: Optional[torch.Tensor],
    lambda_aux: float,
    value_coef: float = 0.5,
    entropy_coef: float = 0.01,
) -> TotalLoss:
    """L_total = L_policy + c_v L_value + c_e L_entropy + lambda (L_dist + L_ang)."""
    total = ppo.policy + value_coef * ppo.value + entropy_coef * ppo.entropy

    l_aux = None
    if l_dist is not None and l_ang is not None:
        l_aux = l_dist + l_ang
        total = total + lambda_aux * l_aux

    breakdown = LossBreakdown(
        l_dist=_item(l_dist),
        l_ang=_item(l_ang),
        l_aux=_item(l_aux),
        l_ppo_policy=_item(ppo.policy),
        l_value=_item(ppo.value),
        l_entropy=_item(ppo.entropy),
        l_total=_item(total),
    )
    return TotalLoss(total=total, breakdown=breakdown)


def _item(x: Optional[torch.Tensor]) -> Optional[float]:
    return None if x is None else float(x.detach())

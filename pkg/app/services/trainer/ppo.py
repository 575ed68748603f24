"""
PPO update with auxiliary geometric supervision.

Minibatches are groups of whole environment sequences so the GRU can be
re-run from the stored segment-start state, zeroing it wherever an episode
starts.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import torch

from app.core.exceptions import InvalidArgumentError, TrainingDivergedError
from app.core.reproducibility import make_rng
from app.schemas.config import TrainConfig
from app.schemas.records import LossBreakdown
from app.services.losses import aux_terms, ppo_loss, total_loss
from app.services.model import RavnNetwork
from app.services.trainer.rollout import RolloutBatch, mask_hidden

SHUFFLE_STREAM = 7
ADVANTAGE_EPS = 1e-8


@dataclass
class Replay:
    """Network outputs re-computed over (T, n) transitions."""
    logits: torch.Tensor
    values: torch.Tensor
    mu: Optional[torch.Tensor] = None
    log_var: Optional[torch.Tensor] = None
    phi_hat: Optional[torch.Tensor] = None


def replay(network: RavnNetwork, batch: RolloutBatch, envs: Sequence[int]) -> Replay:
    """Re-run the recurrent network over the selected env sequences."""
    index = torch.as_tensor(list(envs), dtype=torch.long)
    h = batch.initial_hidden[index]

    logits, values, mu, log_var, phi_hat = [], [], [], [], []
    for t in range(batch.rollout_length):
        h = mask_hidden(h, batch.starts[t, index])
        out = network(batch.spectra[t, index], batch.depths[t, index], h)
        h = out.policy.h_t

        logits.append(out.policy.logits)
        values.append(out.policy.value)
        if out.agr is not None:
            mu.append(out.agr.mu)
            log_var.append(out.agr.log_var)
            phi_hat.append(out.agr.phi_hat)

    has_agr = bool(mu)
    return Replay(
        logits=torch.stack(logits),
        values=torch.stack(values),
        mu=torch.stack(mu) if has_agr else None,
        log_var=torch.stack(log_var) if has_agr else None,
        phi_hat=torch.stack(phi_hat) if has_agr else None,
    )


def normalized_advantages(advantages: np.ndarray, dtype: torch.dtype) -> torch.Tensor:
    adv = torch.as_tensor(advantages, dtype=dtype)
    if adv.numel() > 1:
        adv = (adv - adv.mean()) / (adv.std() + ADVANTAGE_EPS)
    return adv


def clip_gradients(parameters: Iterable[torch.nn.Parameter], max_norm: float) -> Tuple[float, float]:
    """Clip the global gradient norm in place; returns the norm before and after."""
    params = [p for p in parameters if p.grad is not None]
    if not params:
        return 0.0, 0.0
    pre = float(torch.nn.utils.clip_grad_norm_(params, max_norm))
    post = float(torch.linalg.vector_norm(torch.stack([torch.linalg.vector_norm(p.grad) for p in params])))
    return pre, post


def update(
    network: RavnNetwork,
    optimizer: torch.optim.Optimizer,
    batch: RolloutBatch,
    config: TrainConfig,
    update_index: int = 0,
) -> LossBreakdown:
    """
    Run `ppo_epochs` passes over shuffled minibatches of env sequences.

    Each minibatch takes one clipped gradient step. Returns the loss terms
    averaged over all minibatch steps.
    """
    if batch.advantages is None or batch.returns is None:
        raise InvalidArgumentError("update() needs a batch with advantages; run compute_gae first")

    dtype = network.actor.weight.dtype
    advantages = normalized_advantages(batch.advantages, dtype)
    returns = torch.as_tensor(batch.returns, dtype=dtype)
    variant = network.variant

    rng = make_rng(config.model_seed, SHUFFLE_STREAM, update_index)
    groups = min(config.minibatches, batch.num_envs)
    breakdowns: List[LossBreakdown] = []

    for epoch in range(config.ppo_epochs):
        order = rng.permutation(batch.num_envs)
        for envs in np.array_split(order, groups):
            index = torch.as_tensor(envs, dtype=torch.long)
            out = replay(network, batch, envs)

            ppo = ppo_loss(
                out.logits.reshape(-1, out.logits.shape[-1]),
                batch.actions[:, index].reshape(-1),
                batch.log_probs[:, index].reshape(-1),
                advantages[:, index].reshape(-1),
                out.values.reshape(-1),
                returns[:, index].reshape(-1),
                clip_eps=config.clip_eps,
            )
            l_dist, l_ang = aux_terms(
                variant,
                out.mu.reshape(-1) if out.mu is not None else None,
                out.log_var.reshape(-1) if out.log_var is not None else None,
                out.phi_hat.reshape(-1) if out.phi_hat is not None else None,
                batch.y_dist[:, index].reshape(-1),
                batch.y_ang[:, index].reshape(-1),
            )
            loss = total_loss(
                ppo,
                l_dist,
                l_ang,
                lambda_aux=config.lambda_aux,
                value_coef=config.value_coef,
                entropy_coef=config.entropy_coef,
            )

            if not torch.isfinite(loss.total):
                raise TrainingDivergedError(
                    f"Non-finite loss in update {update_index}, epoch {epoch}",
                    {
                        "update": update_index,
                        "epoch": epoch,
                        "envs": [int(e) for e in envs],
                        **loss.breakdown.model_dump(),
                    },
                )

            optimizer.zero_grad()
            loss.total.backward()
            clip_gradients(network.parameters(), config.max_grad_norm)
            optimizer.step()
            breakdowns.append(loss.breakdown)

    return LossBreakdown.average(breakdowns)


def make_optimizer(network: RavnNetwork, config: TrainConfig) -> torch.optim.Adam:
    return torch.optim.Adam(network.parameters(), lr=config.learning_rate, eps=config.adam_eps)

"""
Supervised reliability probe.

Trains only the audio encoder and geometry reasoner on (AudioObs -> targets)
pairs drawn from random poses, then checks on held-out samples whether the
predicted variance tracks the true occlusion count and whether the learned
variance beats the best single constant variance.
"""

from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np
import torch
from scipy.stats import spearmanr

from app.core.exceptions import InvalidArgumentError
from app.core.logging import get_logger
from app.core.reproducibility import make_rng
from app.schemas.config import ModelConfig, ObservationConfig, ProbeConfig, Variant
from app.schemas.records import ProbeReport
from app.services.losses import ang_loss, dist_nll
from app.services.model import RavnNetwork, build_network
from app.services.observe import ClassSignature, class_signature, render_audio, targets
from app.services.world import GridMap, Heading, Pose, occlusion_count, sample_episode

logger = get_logger("trainer.probe")

CONSTANT_GRID = 241
TRAIN_STREAM = 0
EVAL_STREAM = 1
SHUFFLE_STREAM = 2


@dataclass
class ProbeData:
    spectra: np.ndarray    # (N, 2F)
    y_dist: np.ndarray     # (N,)
    y_ang: np.ndarray      # (N,)
    occlusion: np.ndarray  # (N,)

    def __len__(self) -> int:
        return self.y_dist.shape[0]


def sample_probe_data(
    maps: Mapping[str, GridMap],
    obs_config: ObservationConfig,
    classes,
    count: int,
    rng: np.random.Generator,
) -> ProbeData:
    """
    Draw `count` supervised samples.

    Each sample places a source at a random episode goal and the listener at a
    uniformly random reachable pose, so occlusion counts range over whatever
    the maps offer.
    """
    if not maps:
        raise InvalidArgumentError("At least one map is required for the probe")

    map_ids = sorted(maps)
    signatures: Dict[int, ClassSignature] = {}
    spectra, y_dist, y_ang, occlusion = [], [], [], []

    for _ in range(count):
        grid = maps[map_ids[int(rng.integers(len(map_ids)))]]
        episode = sample_episode(grid, rng, classes, max_steps=1)

        field = grid.distance_field(episode.goal)
        ys, xs = np.nonzero(field >= 0)
        i = int(rng.integers(len(xs)))
        pose = Pose(int(xs[i]), int(ys[i]), Heading(int(rng.integers(4))))

        if episode.sound_class not in signatures:
            signatures[episode.sound_class] = class_signature(
                episode.sound_class, obs_config.audio_seed, obs_config.spectrum_bins
            )
        audio = render_audio(grid, pose, episode.goal, signatures[episode.sound_class], rng, obs_config)
        target = targets(grid, pose, episode.goal, obs_config.d_max)

        spectra.append(audio.spectrum)
        y_dist.append(target.y_dist)
        y_ang.append(target.y_ang)
        occlusion.append(occlusion_count(grid, pose.cell, episode.goal))

    return ProbeData(
        spectra=np.stack(spectra),
        y_dist=np.asarray(y_dist),
        y_ang=np.asarray(y_ang),
        occlusion=np.asarray(occlusion, dtype=np.int64),
    )


def _predict(network: RavnNetwork, spectra: torch.Tensor):
    return network.agr_forward(network.encode_audio(spectra))


def fit_probe(network: RavnNetwork, data: ProbeData, config: ProbeConfig) -> RavnNetwork:
    """Minimise NLL + wrapped azimuth loss over the audio encoder and reasoner only."""
    parameters = list(network.audio_encoder.parameters()) + list(network.agr.parameters())
    optimizer = torch.optim.Adam(parameters, lr=config.learning_rate)

    spectra = torch.as_tensor(data.spectra, dtype=torch.float32)
    y_dist = torch.as_tensor(data.y_dist, dtype=torch.float32)
    y_ang = torch.as_tensor(data.y_ang, dtype=torch.float32)
    rng = make_rng(config.seed, SHUFFLE_STREAM)

    for epoch in range(config.epochs):
        order = rng.permutation(len(data))
        total = 0.0
        for start in range(0, len(data), config.batch_size):
            index = torch.as_tensor(order[start:start + config.batch_size])
            out = _predict(network, spectra[index])
            loss = (
                dist_nll(out.mu, out.log_var, y_dist[index]).mean()
                + ang_loss(out.phi_hat, y_ang[index]).mean()
            )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(index)

        logger.debug(
            f"Probe epoch {epoch}: loss {total / len(data):.4f}",
            extra={"epoch": epoch, "loss": total / len(data)},
        )

    return network


def best_constant_nll(residual2: np.ndarray, log_var_min: float, log_var_max: float):
    """Lowest mean NLL over constant log-variances; returns (nll, log_var)."""
    candidates = np.linspace(log_var_min, log_var_max, CONSTANT_GRID)
    optimum = np.log(max(float(residual2.mean()), 1e-12))
    candidates = np.append(candidates, np.clip(optimum, log_var_min, log_var_max))

    nll = 0.5 * candidates[:, None] + residual2[None, :] / (2.0 * np.exp(candidates[:, None]))
    means = nll.mean(axis=1)
    best = int(np.argmin(means))
    return float(means[best]), float(candidates[best])


def run_probe(
    maps: Mapping[str, GridMap],
    obs_config: ObservationConfig,
    model_config: ModelConfig,
    config: ProbeConfig,
) -> ProbeReport:
    network = build_network(
        model_config.model_copy(update={"variant": Variant.AGR_NLL}), seed=config.seed
    )
    train_data = sample_probe_data(
        maps, obs_config, config.classes, config.train_samples, make_rng(config.seed, TRAIN_STREAM)
    )
    eval_data = sample_probe_data(
        maps, obs_config, config.classes, config.eval_samples, make_rng(config.seed, EVAL_STREAM)
    )
    logger.info(
        f"Probe: {len(train_data)} training / {len(eval_data)} held-out samples",
        extra={"train_samples": len(train_data), "eval_samples": len(eval_data)},
    )

    fit_probe(network, train_data, config)

    with torch.no_grad():
        out = _predict(network, torch.as_tensor(eval_data.spectra, dtype=torch.float32))
        y_dist = torch.as_tensor(eval_data.y_dist, dtype=torch.float32)
        heldout_nll = float(dist_nll(out.mu, out.log_var, y_dist).mean())
        sigma2 = out.sigma2.double().numpy()
        residual2 = ((y_dist - out.mu) ** 2).double().numpy()

    constant_nll, constant_log_var = best_constant_nll(
        residual2, model_config.log_var_min, model_config.log_var_max
    )
    rho = float(spearmanr(sigma2, eval_data.occlusion)[0])
    by_k = {
        int(k): float(sigma2[eval_data.occlusion == k].mean())
        for k in np.unique(eval_data.occlusion)
    }

    report = ProbeReport(
        train_samples=len(train_data),
        eval_samples=len(eval_data),
        spearman_sigma2_occlusion=rho,
        heldout_nll=heldout_nll,
        constant_nll=constant_nll,
        constant_log_var=constant_log_var,
        mean_sigma2_by_occlusion=by_k,
    )
    logger.info(
        f"Probe: spearman(sigma2, k) = {rho:.3f}, NLL {heldout_nll:.4f} "
        f"vs constant {constant_nll:.4f}",
        extra=report.model_dump(),
    )
    return report

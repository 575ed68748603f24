"""
Checkpoint files.

A checkpoint is a `torch.save` archive holding a plain dict:

    {"format": "ravn-checkpoint", "version": 1,
     "model_config": {...ModelConfig as JSON types...},
     "tensors": {parameter name: tensor}}

It is loaded with `weights_only=True`, so only tensors and primitive
containers are accepted.
"""

from collections import OrderedDict
from pathlib import Path
from typing import Dict, Tuple, Union

import torch

from app.core.exceptions import CheckpointError, CheckpointVersionError
from app.core.logging import get_logger
from app.schemas.config import ModelConfig
from app.services.model.network import RavnNetwork

logger = get_logger("model.checkpoint")

CHECKPOINT_FORMAT = "ravn-checkpoint"
CHECKPOINT_VERSION = 1

Parameters = Dict[str, torch.Tensor]


def save_params(network: RavnNetwork, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "model_config": network.config.model_dump(mode="json"),
        "tensors": OrderedDict(
            (name, tensor.detach().clone()) for name, tensor in network.state_dict().items()
        ),
    }
    torch.save(payload, path)
    logger.debug(f"Saved checkpoint {path}", extra={"path": str(path)})
    return path


def load_params(path: Union[str, Path]) -> Tuple[ModelConfig, Parameters]:
    """Read a checkpoint; returns the network config and the named tensors."""
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"Checkpoint not found: {path}", {"path": str(path)})

    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise CheckpointError(
            f"Checkpoint {path} is corrupt or unreadable: {e}", {"path": str(path)}
        ) from e

    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a checkpoint file", {"path": str(path)})

    version = payload.get("version")
    if version != CHECKPOINT_VERSION:
        raise CheckpointVersionError(
            f"Checkpoint {path} has version {version}, expected {CHECKPOINT_VERSION}",
            {"path": str(path), "version": version},
        )

    try:
        config = ModelConfig.model_validate(payload["model_config"])
        tensors = dict(payload["tensors"])
    except Exception as e:
        raise CheckpointError(f"Checkpoint {path} has a malformed body: {e}") from e

    return config, tensors


def load_network(path: Union[str, Path]) -> RavnNetwork:
    """Rebuild the exact network stored in a checkpoint."""
    config, tensors = load_params(path)
    network = RavnNetwork(config)
    try:
        network.load_state_dict(tensors, strict=True)
    except RuntimeError as e:
        raise CheckpointError(f"Checkpoint {path} does not match its network config: {e}") from e
    network.eval()
    return network

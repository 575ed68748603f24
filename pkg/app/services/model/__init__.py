"""RAVN network, its ablation variants and checkpoint I/O."""

from app.services.model.checkpoint import (
    CHECKPOINT_FORMAT,
    CHECKPOINT_VERSION,
    load_network,
    load_params,
    save_params,
)
from app.services.model.network import (
    AcousticGeometryReasoner,
    AgrOutput,
    PolicyOutput,
    RavnNetwork,
    ReliabilityGate,
    StepOutput,
    build_network,
)

__all__ = [
    "AcousticGeometryReasoner",
    "AgrOutput",
    "CHECKPOINT_FORMAT",
    "CHECKPOINT_VERSION",
    "PolicyOutput",
    "RavnNetwork",
    "ReliabilityGate",
    "StepOutput",
    "build_network",
    "load_network",
    "load_params",
    "save_params",
]

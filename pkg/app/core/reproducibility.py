"""
Seeding and deterministic execution.

All randomness in the package flows from explicit numpy Generators built
here; torch only draws from its global RNG inside seed_model_init.
"""

from typing import Sequence

import numpy as np
import torch


def make_rng(*keys: int) -> np.random.Generator:
    """numpy Generator whose stream is a pure function of the integer keys."""
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in keys]))


def configure_torch(threads: int = 1):
    """Pin torch to deterministic CPU kernels."""
    torch.set_num_threads(threads)
    torch.use_deterministic_algorithms(True)


def seed_model_init(seed: int, extra: Sequence[int] = ()) -> None:
    """Seed the global torch RNG used by nn.Module initialisers."""
    torch.manual_seed(int(np.random.SeedSequence([seed, *extra]).generate_state(1)[0]))

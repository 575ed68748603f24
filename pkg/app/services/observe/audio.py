"""
Synthetic binaural audio.

Each sound class has a fixed spectral signature. The agent hears it through
a linear panning law whose azimuth is corrupted in proportion to the number
of walls between agent and source, attenuated by geodesic distance, plus
per-bin noise that also grows with occlusion.
"""

import math
from dataclasses import dataclass

import numpy as np

from app.core.exceptions import InvalidArgumentError
from app.schemas.config import ObservationConfig
from app.services.observe.geometry import source_azimuth, wrap_radians
from app.services.world import Cell, GridMap, Pose, geodesic_distance, occlusion_count

SIGNATURE_LOW = 0.1
SIGNATURE_HIGH = 1.0


@dataclass(frozen=True, eq=False)
class ClassSignature:
    class_id: int
    signature: np.ndarray


@dataclass(frozen=True, eq=False)
class AudioObs:
    """[left channel (F bins) | right channel (F bins)]."""
    spectrum: np.ndarray

    @property
    def left(self) -> np.ndarray:
        return self.spectrum[: self.spectrum.size // 2]

    @property
    def right(self) -> np.ndarray:
        return self.spectrum[self.spectrum.size // 2:]


def class_signature(class_id: int, audio_seed: int, bins: int) -> ClassSignature:
    """
    Spectral signature of a sound class.

    Drawn from a Philox counter-based generator keyed on (audio_seed, class_id),
    so any class can be regenerated independently of the others.
    """
    if class_id < 0:
        raise InvalidArgumentError(f"class_id must be non-negative, got {class_id}")

    bit_generator = np.random.Philox(key=[audio_seed % 2**64, class_id])
    signature = np.random.Generator(bit_generator).uniform(SIGNATURE_LOW, SIGNATURE_HIGH, bins)
    signature.setflags(write=False)
    return ClassSignature(class_id=class_id, signature=signature)


def panning_gains(phi: float):
    """Linear panning law; the two gains always sum to 1."""
    s = math.sin(phi)
    return (1.0 + s) / 2.0, (1.0 - s) / 2.0


def binaural_spectrum(
    phi: float,
    distance: float,
    signature: np.ndarray,
    azimuth_std: float,
    noise_std: float,
    rng: np.random.Generator,
) -> AudioObs:
    """
    Render one observation from already-computed geometry.

    Draw order is fixed (azimuth jitter, then left bins, then right bins) so
    a given generator state always yields the same spectrum.
    """
    bins = signature.size
    phi_noisy = wrap_radians(phi + rng.normal(0.0, azimuth_std))
    eta_left = rng.normal(0.0, noise_std, bins)
    eta_right = rng.normal(0.0, noise_std, bins)

    g_left, g_right = panning_gains(phi_noisy)
    attenuation = 1.0 / (1.0 + distance)

    left = attenuation * g_left * signature + eta_left
    right = attenuation * g_right * signature + eta_right
    return AudioObs(spectrum=np.concatenate([left, right]))


def noise_levels(k: int, config: ObservationConfig):
    """(azimuth std, per-bin std) for an occlusion count k."""
    azimuth_std = config.azimuth_noise_base + config.azimuth_noise_slope * min(k, config.occlusion_cap)
    noise_std = config.spectral_noise_base + config.spectral_noise_slope * k
    return azimuth_std, noise_std


def render_audio(
    grid: GridMap,
    pose: Pose,
    goal: Cell,
    sig: ClassSignature,
    rng: np.random.Generator,
    config: ObservationConfig,
) -> AudioObs:
    """Binaural observation of the source at `goal` heard from `pose`."""
    d = geodesic_distance(grid, pose.cell, goal)
    if d is None:
        raise InvalidArgumentError(f"Goal {goal} is unreachable from {pose.cell}")

    k = occlusion_count(grid, pose.cell, goal)
    azimuth_std, noise_std = noise_levels(k, config)
    return binaural_spectrum(
        source_azimuth(pose, goal), float(d), sig.signature, azimuth_std, noise_std, rng
    )

"""Synthetic binaural audio, depth rays and geometric supervision targets."""

from app.services.observe.audio import (
    AudioObs,
    ClassSignature,
    binaural_spectrum,
    class_signature,
    noise_levels,
    panning_gains,
    render_audio,
)
from app.services.observe.depth import VisualObs, render_depth
from app.services.observe.geometry import (
    GeometricTargets,
    relative_azimuth,
    source_azimuth,
    targets,
    wrap_radians,
)

__all__ = [
    "AudioObs",
    "ClassSignature",
    "GeometricTargets",
    "VisualObs",
    "binaural_spectrum",
    "class_signature",
    "noise_levels",
    "panning_gains",
    "relative_azimuth",
    "render_audio",
    "render_depth",
    "source_azimuth",
    "targets",
    "wrap_radians",
]

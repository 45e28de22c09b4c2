"""Deterministic WLAN coverage, interference and adaptive-beamforming simulator."""

__version__ = "0.1.0"

from . import arrays, channels, nlms, propagation, spectrum, survey, throughput

__all__ = [
    "arrays",
    "channels",
    "nlms",
    "propagation",
    "spectrum",
    "survey",
    "throughput",
    "__version__",
]

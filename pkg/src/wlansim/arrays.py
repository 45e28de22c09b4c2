"""Uniform-linear-array snapshot synthesis and array patterns.

A scenario describes one adaptive-beamforming experiment: the array
geometry, a set of angular sources (one of which is the desired signal),
the additive noise power, and the adaptation parameters.  Snapshots are
complex baseband observation vectors; all randomness is keyed on
``(seed, stream, sample index)`` so any snapshot is reproducible in
isolation and independent of generation order.
"""

from __future__ import annotations

import cmath
import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

ROLE_DESIRED = "desired"
ROLE_INTERFERER = "interferer"
WAVEFORM_SINUSOID = "sinusoid"
WAVEFORM_SYMBOLS = "symbols"

# Pattern gains are clamped here so perfect nulls stay finite in reports.
GAIN_FLOOR_DB = -80.0

_NOISE_STREAM = 0  # stream ids: 0 = noise, 1 + source index = that source


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array: element count and spacing in wavelengths."""

    num_elements: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self) -> None:
        if self.num_elements < 1:
            raise ValueError(f"num_elements must be >= 1, got {self.num_elements}")
        if self.spacing_wavelengths <= 0:
            raise ValueError(f"spacing must be positive, got {self.spacing_wavelengths}")


@dataclass(frozen=True)
class Source:
    """One angular source: role, direction, waveform and amplitude.

    Angles are in radians from broadside, positive toward increasing
    element index.  ``normalized_freq`` is the sinusoid frequency in
    cycles per sample and is ignored for the random-symbols waveform.
    """

    role: str
    angle_rad: float
    waveform: str = WAVEFORM_SINUSOID
    normalized_freq: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.role not in (ROLE_DESIRED, ROLE_INTERFERER):
            raise ValueError(f"source role must be 'desired' or 'interferer', got {self.role!r}")
        if not abs(self.angle_rad) < math.pi / 2:
            raise ValueError(f"source angle {self.angle_rad} not strictly inside (-pi/2, pi/2)")
        if self.waveform not in (WAVEFORM_SINUSOID, WAVEFORM_SYMBOLS):
            raise ValueError(f"unknown waveform {self.waveform!r}")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")


@dataclass(frozen=True)
class Snapshot:
    """One array observation ``x`` with its reference sample ``d``."""

    x: np.ndarray
    d: complex
    index: int


@dataclass(frozen=True)
class Scenario:
    """Full description of one beamforming experiment.

    ``sampling_hz`` is recorded metadata only; signals are generated at
    complex baseband with normalized frequencies.
    """

    carrier_hz: float
    num_elements: int
    spacing_wavelengths: float
    step_size: float
    iterations: int
    seed: int
    noise_power: float
    sources: tuple[Source, ...]
    sampling_hz: float | None = None

    @property
    def array(self) -> ArrayConfig:
        return ArrayConfig(self.num_elements, self.spacing_wavelengths)

    def validate(self) -> None:
        """Raise ValueError with a field-level message on the first problem."""
        if self.carrier_hz <= 0:
            raise ValueError(f"carrier_hz: must be positive, got {self.carrier_hz}")
        if self.num_elements < 1:
            raise ValueError(f"num_elements: must be >= 1, got {self.num_elements}")
        if self.spacing_wavelengths <= 0:
            raise ValueError(f"spacing_wavelengths: must be positive, got {self.spacing_wavelengths}")
        if self.step_size < 0:
            raise ValueError(f"step_size: must be >= 0, got {self.step_size}")
        if self.iterations < 1:
            raise ValueError(f"iterations: must be >= 1, got {self.iterations}")
        if self.noise_power < 0:
            raise ValueError(f"noise_power: must be >= 0, got {self.noise_power}")
        if not self.sources:
            raise ValueError("sources: at least one source required")
        if not any(s.role == ROLE_DESIRED for s in self.sources):
            raise ValueError("sources: no source with role 'desired'")

    def desired_source(self) -> Source:
        for s in self.sources:
            if s.role == ROLE_DESIRED:
                return s
        raise ValueError("sources: no source with role 'desired'")

    def to_dict(self) -> dict:
        d = {
            "carrier_hz": self.carrier_hz,
            "num_elements": self.num_elements,
            "spacing_wavelengths": self.spacing_wavelengths,
            "step_size": self.step_size,
            "iterations": self.iterations,
            "seed": self.seed,
            "noise_power": self.noise_power,
            "sources": [
                {
                    "role": s.role,
                    "angle_rad": s.angle_rad,
                    "waveform": s.waveform,
                    "normalized_freq": s.normalized_freq,
                    "amplitude": s.amplitude,
                }
                for s in self.sources
            ],
        }
        if self.sampling_hz is not None:
            d["sampling_hz"] = self.sampling_hz
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        try:
            sources = tuple(
                Source(
                    role=s["role"],
                    angle_rad=float(s["angle_rad"]),
                    waveform=s.get("waveform", WAVEFORM_SINUSOID),
                    normalized_freq=float(s.get("normalized_freq", 0.0)),
                    amplitude=float(s.get("amplitude", 1.0)),
                )
                for s in data["sources"]
            )
            scenario = cls(
                carrier_hz=float(data["carrier_hz"]),
                num_elements=int(data["num_elements"]),
                spacing_wavelengths=float(data["spacing_wavelengths"]),
                step_size=float(data["step_size"]),
                iterations=int(data["iterations"]),
                seed=int(data["seed"]),
                noise_power=float(data["noise_power"]),
                sources=sources,
                sampling_hz=float(data["sampling_hz"]) if "sampling_hz" in data else None,
            )
        except KeyError as exc:
            raise ValueError(f"scenario file missing field {exc.args[0]!r}") from exc
        scenario.validate()
        return scenario

    @classmethod
    def from_json_file(cls, path: str | Path) -> "Scenario":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_json_file(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")


def default_scenario() -> Scenario:
    """The shipped 8-element experiment: equal-power desired/interferer
    tones at +/- pi/4 with 20 dB per-element SNR and step size 0.32."""
    return Scenario(
        carrier_hz=5e9,
        num_elements=8,
        spacing_wavelengths=0.5,
        step_size=0.32,
        iterations=5000,
        seed=20240511,
        noise_power=0.01,
        sources=(
            Source(ROLE_DESIRED, math.pi / 4, WAVEFORM_SINUSOID, 0.125, 1.0),
            Source(ROLE_INTERFERER, -math.pi / 4, WAVEFORM_SINUSOID, 0.25, 1.0),
        ),
        sampling_hz=1e10,
    )


def steering_vector(theta_rad: float, cfg: ArrayConfig) -> np.ndarray:
    """Phase signature of a plane wave from ``theta_rad`` across the array.

    Element ``k`` is ``exp(-j*2*pi*k*spacing*sin(theta))``; every entry
    has unit magnitude.
    """
    k = np.arange(cfg.num_elements)
    return np.exp(-2j * np.pi * k * cfg.spacing_wavelengths * math.sin(theta_rad))


def _stream_rng(seed: int, stream: int, n: int) -> np.random.Generator:
    # Keyed generator: reproducible per sample, independent of call order.
    return np.random.default_rng((seed, stream, n))


def _source_sample(source: Source, seed: int, stream: int, n: int) -> complex:
    if source.waveform == WAVEFORM_SINUSOID:
        return source.amplitude * cmath.exp(2j * math.pi * source.normalized_freq * n)
    # Random QPSK-style symbols on the unit circle.
    rng = _stream_rng(seed, stream, n)
    phase = (int(rng.integers(0, 4)) + 0.5) * math.pi / 2
    return source.amplitude * cmath.exp(1j * phase)


def _noise_vector(num_elements: int, power: float, seed: int, n: int) -> np.ndarray:
    if power == 0.0:
        return np.zeros(num_elements, dtype=complex)
    rng = _stream_rng(seed, _NOISE_STREAM, n)
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(num_elements) + 1j * rng.standard_normal(num_elements))


def synthesize(scenario: Scenario, n: int) -> Snapshot:
    """Generate observation vector x(n) and reference sample d(n).

    ``x`` is the steering-weighted sum of all source samples plus circular
    complex Gaussian noise of the configured power; ``d`` is the desired
    source's clean sample.  Deterministic given (scenario, seed, n).
    """
    scenario.validate()
    cfg = scenario.array
    x = np.zeros(cfg.num_elements, dtype=complex)
    d = 0j
    for i, src in enumerate(scenario.sources):
        s = _source_sample(src, scenario.seed, 1 + i, n)
        x += s * steering_vector(src.angle_rad, cfg)
        if src.role == ROLE_DESIRED:
            d += s
    x += _noise_vector(cfg.num_elements, scenario.noise_power, scenario.seed, n)
    return Snapshot(x=x, d=d, index=n)


def array_pattern(
    w: np.ndarray, cfg: ArrayConfig, grid: Sequence[float]
) -> list[tuple[float, float]]:
    """Gain of weight vector ``w`` over a grid of angles, in dB.

    Gain is ``20*log10(|w^H a(theta)|)``, clamped at ``GAIN_FLOOR_DB``.

    Raises:
        ValueError: if the weight vector length does not match the array.
    """
    w = np.asarray(w)
    if w.shape != (cfg.num_elements,):
        raise ValueError(
            f"weight vector length {w.shape} does not match {cfg.num_elements} elements"
        )
    out = []
    for theta in grid:
        mag = abs(np.vdot(w, steering_vector(theta, cfg)))
        gain = 20.0 * math.log10(mag) if mag > 0 else GAIN_FLOOR_DB
        out.append((float(theta), max(gain, GAIN_FLOOR_DB)))
    return out


def pattern_to_csv(pattern: Sequence[tuple[float, float]], out: IO[str]) -> None:
    """Write an angle/gain pattern as CSV: angle_rad,gain_db."""
    writer = csv.writer(out)
    writer.writerow(["angle_rad", "gain_db"])
    for angle, gain in pattern:
        writer.writerow([angle, gain])

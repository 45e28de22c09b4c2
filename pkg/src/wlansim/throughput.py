"""PHY rate limits, modulation accounting, and throughput-vs-distance curves.

Peak client rates are the published single- and three-stream figures for
the two modelled standards; the SNR-to-rate staircase is configurable
because no standard mapping is mandated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Sequence

from .propagation import PathLossModel, received_power


class Standard(Enum):
    N80211 = "n"
    AC80211 = "ac"


class Modulation(Enum):
    QAM64 = 64
    QAM256 = 256


# Maximum client data rate in Mbps by (standard, spatial streams).
MAX_CLIENT_RATE_MBPS: dict[tuple[Standard, int], float] = {
    (Standard.N80211, 1): 150.0,
    (Standard.N80211, 3): 450.0,
    (Standard.AC80211, 1): 450.0,
    (Standard.AC80211, 3): 1300.0,
}

_N_WIDTHS = (20, 40)
# The published "106 MHz optional" entry is encoded as the 160 MHz option.
_AC_WIDTHS = (20, 40, 80, 160)

NOISE_FLOOR_20MHZ_DBM = -90.0

# Default staircase shape: 8 rate rungs up to the cap, 3 dB apart.
DEFAULT_STAIRCASE_STEPS = 8
DEFAULT_STAIRCASE_BASE_SNR_DB = 5.0
DEFAULT_STAIRCASE_STEP_DB = 3.0


@dataclass(frozen=True)
class PhyConfig:
    """A PHY operating point; construction enforces per-standard limits."""

    standard: Standard
    channel_width_mhz: int = 20
    spatial_streams: int = 1
    modulation: Modulation = Modulation.QAM64

    def __post_init__(self) -> None:
        if not 1 <= self.spatial_streams <= 8:
            raise ValueError(f"spatial_streams must be in 1..8, got {self.spatial_streams}")
        if self.standard is Standard.N80211:
            if self.channel_width_mhz not in _N_WIDTHS:
                raise ValueError(
                    f"802.11n supports 20/40 MHz widths, got {self.channel_width_mhz}"
                )
            if self.spatial_streams > 4:
                raise ValueError("802.11n supports at most 4 spatial streams")
            if self.modulation is Modulation.QAM256:
                raise ValueError("802.11n does not support 256-QAM")
        else:
            if self.channel_width_mhz not in _AC_WIDTHS:
                raise ValueError(
                    f"802.11ac supports 20/40/80/160 MHz widths, got {self.channel_width_mhz}"
                )


@dataclass(frozen=True)
class RateEntry:
    config: PhyConfig
    rate_mbps: float

    def __post_init__(self) -> None:
        if self.rate_mbps <= 0:
            raise ValueError("rate must be positive")


def max_client_rate(standard: Standard, streams: int) -> float:
    """Published peak client rate in Mbps.

    Raises:
        KeyError: when the (standard, streams) cell is not tabulated.
    """
    try:
        return MAX_CLIENT_RATE_MBPS[(standard, streams)]
    except KeyError:
        raise KeyError(
            f"no published rate for {standard.value} with {streams} streams"
        ) from None


def bits_per_symbol(modulation: Modulation) -> int:
    """Coded bits carried per symbol: log2 of the constellation size."""
    return int(math.log2(modulation.value))


def noise_floor_dbm(channel_width_mhz: int) -> float:
    """Thermal floor: -90 dBm in 20 MHz, +3 dB per width doubling."""
    if channel_width_mhz <= 0:
        raise ValueError("channel width must be positive")
    return NOISE_FLOOR_20MHZ_DBM + 3.0 * math.log2(channel_width_mhz / 20.0)


def default_snr_staircase(cap_mbps: float) -> list[tuple[float, float]]:
    """Evenly spaced rate rungs: 1/8 .. 8/8 of the cap at 5, 8, .. 26 dB."""
    steps = DEFAULT_STAIRCASE_STEPS
    return [
        (
            DEFAULT_STAIRCASE_BASE_SNR_DB + k * DEFAULT_STAIRCASE_STEP_DB,
            cap_mbps * (k + 1) / steps,
        )
        for k in range(steps)
    ]


def snr_to_rate(snr_db: float, staircase: Sequence[tuple[float, float]]) -> float:
    """Highest staircase rate whose threshold the SNR reaches, else 0."""
    rate = 0.0
    for threshold, step_rate in sorted(staircase):
        if snr_db >= threshold:
            rate = step_rate
    return rate


def link_snr(
    model: PathLossModel,
    tx_eirp_dbm: float,
    distance_m: float,
    channel_width_mhz: int,
    rx_gain_db: float = 0.0,
) -> float:
    """SNR at the receiver for one link distance, in dB."""
    rx_dbm = received_power(tx_eirp_dbm, model.path_loss(distance_m), rx_gain_db)
    return rx_dbm - noise_floor_dbm(channel_width_mhz)


def throughput_vs_distance(
    cfg: PhyConfig,
    model: PathLossModel,
    tx_eirp_dbm: float,
    distances: Sequence[float],
    staircase: Sequence[tuple[float, float]] | None = None,
    rx_gain_db: float = 0.0,
) -> list[tuple[float, float]]:
    """Rate curve over distances, capped at the standard's peak client rate.

    Distances must be positive and sorted ascending.  The default
    staircase is :func:`default_snr_staircase` built on that cap, so the
    curve is monotone non-increasing in distance.

    Raises:
        ValueError: for an empty or unsorted/non-positive distance list.
        KeyError: when the config has no tabulated peak rate.
    """
    if len(distances) == 0:
        raise ValueError("distance list must be nonempty")
    if any(d <= 0 for d in distances):
        raise ValueError("distances must be positive")
    if any(b < a for a, b in zip(distances, distances[1:])):
        raise ValueError("distances must be sorted ascending")
    cap = max_client_rate(cfg.standard, cfg.spatial_streams)
    if staircase is None:
        staircase = default_snr_staircase(cap)
    curve = []
    for d in distances:
        snr = link_snr(model, tx_eirp_dbm, d, cfg.channel_width_mhz, rx_gain_db)
        curve.append((float(d), min(snr_to_rate(snr, staircase), cap)))
    return curve


def contention_degradation(
    rate_mbps: float, co_channel: Sequence[tuple[float, float]]
) -> float:
    """Airtime-share degradation from co-channel neighbours.

    Each neighbour is ``(overlap_fraction, activity_fraction)``; the rate
    is scaled by ``max(0, 1 - sum(overlap * activity))``.
    """
    lost = 0.0
    for overlap, activity in co_channel:
        if not 0.0 <= overlap <= 1.0:
            raise ValueError(f"overlap fraction {overlap} outside [0, 1]")
        if not 0.0 <= activity <= 1.0:
            raise ValueError(f"activity fraction {activity} outside [0, 1]")
        lost += overlap * activity
    return rate_mbps * max(0.0, 1.0 - lost)


def curve_to_csv(
    cfg: PhyConfig,
    model: PathLossModel,
    tx_eirp_dbm: float,
    curve: Sequence[tuple[float, float]],
    out: IO[str],
    rx_gain_db: float = 0.0,
) -> None:
    """Write a rate curve as CSV: distance_m,rate_mbps,snr_db."""
    writer = csv.writer(out)
    writer.writerow(["distance_m", "rate_mbps", "snr_db"])
    for d, rate in curve:
        snr = link_snr(model, tx_eirp_dbm, d, cfg.channel_width_mhz, rx_gain_db)
        writer.writerow([d, rate, snr])

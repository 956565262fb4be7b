"""Physical layer: two-state channel quality and the first-order radio
energy costs (transmit, receive, overhear).
"""
from __future__ import annotations

import enum
import random

from .config import ChannelParams, RadioParams


class ChannelState(enum.Enum):
    GOOD = "good"
    BAD = "bad"


def sample_channel_state(channel: ChannelParams, rng: random.Random) -> ChannelState:
    """One per-round draw from the stationary distribution of the two-state
    channel chain; rounds are short enough that the state holds for a round.
    """
    return ChannelState.BAD if rng.random() < channel.p_bad else ChannelState.GOOD


def tx_energy(radio: RadioParams, bits: int, d: float) -> float:
    """Transmit cost: electronics plus the distance-dependent amplifier term
    (free-space below the crossover distance, multipath above)."""
    if bits <= 0:
        raise ValueError("bits must be positive")
    if d < 0:
        raise ValueError("distance must be nonnegative")
    if d < radio.d_0:
        return bits * radio.e_elec + bits * radio.eps_fs * d * d
    return bits * radio.e_elec + bits * radio.eps_amp * d ** 4


def rx_energy(radio: RadioParams, bits: int) -> float:
    """Receive cost: electronics plus per-bit aggregation."""
    if bits <= 0:
        raise ValueError("bits must be positive")
    return bits * radio.e_elec + bits * radio.e_da


def overhear_energy(radio: RadioParams, duration_s: float, bits: int,
                    success: bool) -> float:
    """Overhearing cost: listening time plus the capture cost on success;
    a timeout burns the full maximum listening window."""
    if duration_s < 0 or duration_s > radio.d_m_s:
        raise ValueError("duration must lie in [0, d_m_s]")
    if success:
        return duration_s * radio.e_m + bits * radio.e_h
    return radio.d_m_s * radio.e_m

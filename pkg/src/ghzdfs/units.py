"""Unit conventions and conversion helpers.

Everything inside the package uses one convention: angular frequencies in
rad/s and times in seconds.  Laboratory values are usually quoted as
"mu/2pi = 10 MHz"; the helpers below make that conversion explicit at the
boundary so no factor of 2*pi hides inside the physics code.
"""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi


def angular_from_hz(frequency_hz: float) -> float:
    """Angular frequency (rad/s) from an ordinary frequency in Hz."""
    return TWO_PI * frequency_hz


def angular_from_mhz(frequency_mhz: float) -> float:
    """Angular frequency (rad/s) from a frequency quoted in MHz."""
    return TWO_PI * frequency_mhz * 1e6


def angular_from_ghz(frequency_ghz: float) -> float:
    """Angular frequency (rad/s) from a frequency quoted in GHz."""
    return TWO_PI * frequency_ghz * 1e9


def nanoseconds(t_ns: float) -> float:
    """Seconds from nanoseconds."""
    return t_ns * 1e-9


def microseconds(t_us: float) -> float:
    """Seconds from microseconds."""
    return t_us * 1e-6

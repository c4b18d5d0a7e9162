"""Physical constants (CODATA 2018 values) and unit conversion factors."""

from __future__ import annotations

import math

SPEED_OF_LIGHT = 299_792_458.0  # m/s
HBAR = 1.054_571_817e-34  # J s
EPSILON_0 = 8.854_187_8128e-12  # F/m
BOLTZMANN = 1.380_649e-23  # J/K

TWO_PI = 2.0 * math.pi

PPM = 1e-6
MM = 1e-3
UM = 1e-6
NM = 1e-9
MHZ = 1e6
MS = 1e-3
US = 1e-6
NS = 1e-9


def angular(frequency_hz: float) -> float:
    """Convert a cyclic frequency in Hz to rad/s."""

    return TWO_PI * frequency_hz


def cyclic(angular_frequency: float) -> float:
    """Convert an angular frequency in rad/s to Hz."""

    return angular_frequency / TWO_PI


__all__ = [
    "BOLTZMANN",
    "EPSILON_0",
    "HBAR",
    "MHZ",
    "MM",
    "MS",
    "NM",
    "NS",
    "PPM",
    "SPEED_OF_LIGHT",
    "TWO_PI",
    "UM",
    "US",
    "angular",
    "cyclic",
]

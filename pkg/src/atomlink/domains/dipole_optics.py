"""Free-space collection and single-mode fiber coupling of dipole emission.

An atom at the focus of a lens with numerical aperture NA radiates as a
σ± or π dipole.  Behind the lens the collimated field is compared with a
circularly polarised Gaussian mode; the squared overlap is the fraction of
emission that ends up in a single-mode fiber.

Fields are kept in a dimensionless normalisation in which every dipole puts
exactly half of its power into the forward hemisphere.  Lengths are scaled by
the focal length ``f`` (``x = ρ/f``) and the radial integral is carried out in
the polar emission angle θ with ``x = tan θ``; this keeps the integration
domain finite, so ``NA = 1`` is an ordinary (limiting) input.

The azimuthal integral uses a uniform periodic trapezoid rule, the θ integral
an adaptive composite Gauss-Legendre rule (:mod:`atomlink.core.numerics`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..core.errors import ParameterError
from ..core.numerics import (
    adaptive_gauss_legendre,
    golden_section_maximize,
    periodic_trapezoid_nodes,
)

logger = logging.getLogger(__name__)

QUADRATURE_ATOL = 1e-8
MAX_PANELS = 2**14
AZIMUTHAL_POINTS = 16
WAIST_REL_TOL = 1e-6
# Waist search bracket in units of the aperture radius; the radius is capped so
# that NA -> 1 keeps a finite bracket.
WAIST_BRACKET = (0.05, 5.0)
APERTURE_SCALE_CAP = 10.0

_SIGMA_AMPLITUDE = math.sqrt(3.0 / (16.0 * math.pi))
_PI_AMPLITUDE = math.sqrt(3.0 / (8.0 * math.pi))


class DipolePolarization(str, Enum):
    """Polarisation of the emitting transition relative to the lens axis."""

    SIGMA_PLUS = "sigma_plus"
    SIGMA_MINUS = "sigma_minus"
    PI = "pi"

    @property
    def handedness(self) -> int:
        """+1 for σ+, -1 for σ-, 0 for π."""

        return {"sigma_plus": 1, "sigma_minus": -1, "pi": 0}[self.value]


@dataclass(frozen=True)
class LensSpec:
    """Collection lens.  ``focal_length`` only sets the scale of the results."""

    numerical_aperture: float
    focal_length: float = 1e-3

    def __post_init__(self) -> None:
        if not 0.0 < self.numerical_aperture <= 1.0:
            raise ParameterError("numerical_aperture must lie in (0, 1]")
        if not self.focal_length > 0.0 or not math.isfinite(self.focal_length):
            raise ParameterError("focal_length must be positive and finite")

    @property
    def is_limiting(self) -> bool:
        """True for the NA = 1 endpoint (full forward hemisphere)."""

        return self.numerical_aperture == 1.0

    @property
    def theta_max(self) -> float:
        return math.asin(self.numerical_aperture)

    @property
    def rho_na(self) -> float:
        """Radius of the collimated beam behind the lens, ``f NA/√(1-NA²)``."""

        if self.is_limiting:
            return math.inf
        na = self.numerical_aperture
        return self.focal_length * na / math.sqrt(1.0 - na * na)


@dataclass(frozen=True)
class GaussianMode:
    """Collimated Gaussian fiber mode with 1/e field radius ``waist``."""

    waist: float

    def __post_init__(self) -> None:
        if not self.waist > 0.0 or not math.isfinite(self.waist):
            raise ParameterError("waist must be positive and finite")


@dataclass(frozen=True)
class FiberCoupling:
    """Outcome of the waist optimisation for one polarisation and NA."""

    waist: float
    collection: float
    overlap: float
    efficiency: float


def _dipole_field(
    polarization: DipolePolarization, theta: np.ndarray, phi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Collimated dipole field (ρ̂, φ̂ components) in units of 1/f."""

    cos_t = np.cos(theta)
    projection = cos_t**1.5
    if polarization is DipolePolarization.PI:
        radial = _PI_AMPLITUDE * 1j * projection * np.sin(theta) * np.ones_like(phi)
        return radial, np.zeros_like(radial)
    sign = polarization.handedness
    phase = 1j * np.exp(1j * sign * phi) * _SIGMA_AMPLITUDE * projection
    return phase * (sign * cos_t), phase * 1j


def _gaussian_field(
    handedness: int, waist_scaled: float, theta: np.ndarray, phi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Circularly polarised Gaussian mode in units of 1/f, unit total power."""

    x = np.tan(theta)
    envelope = np.exp(-((x / waist_scaled) ** 2)) / (math.sqrt(math.pi) * waist_scaled)
    phase = envelope * np.exp(1j * handedness * phi)
    return phase, phase * (1j * handedness)


def _measure(theta: np.ndarray) -> np.ndarray:
    # x dx with x = tan θ
    cos_t = np.cos(theta)
    return np.tan(theta) / (cos_t * cos_t)


def _polar_integral(integrand, theta_max: float) -> complex:
    phi, dphi = periodic_trapezoid_nodes(AZIMUTHAL_POINTS)

    def radial(theta: np.ndarray) -> np.ndarray:
        values = integrand(theta[:, None], phi[None, :])
        return np.sum(values, axis=1) * dphi * _measure(theta)

    result = adaptive_gauss_legendre(
        radial, 0.0, theta_max, atol=QUADRATURE_ATOL, max_panels=MAX_PANELS
    )
    return result.value


def _collected_power(polarization: DipolePolarization, theta_max: float) -> float:
    def integrand(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        e_rho, e_phi = _dipole_field(polarization, theta, phi)
        return np.abs(e_rho) ** 2 + np.abs(e_phi) ** 2

    return _polar_integral(integrand, theta_max).real


def _overlap_amplitude(
    polarization: DipolePolarization, handedness: int, theta_max: float, waist_scaled: float
) -> complex:
    def integrand(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        d_rho, d_phi = _dipole_field(polarization, theta, phi)
        g_rho, g_phi = _gaussian_field(handedness, waist_scaled, theta, phi)
        return g_rho * np.conj(d_rho) + g_phi * np.conj(d_phi)

    return _polar_integral(integrand, theta_max)


def _mode_handedness(polarization: DipolePolarization) -> tuple[int, ...]:
    if polarization is DipolePolarization.PI:
        return (1, -1)
    return (polarization.handedness,)


def _coupled_power(
    polarization: DipolePolarization, theta_max: float, waist_scaled: float
) -> float:
    return max(
        abs(_overlap_amplitude(polarization, hand, theta_max, waist_scaled)) ** 2
        for hand in _mode_handedness(polarization)
    )


def collection_fraction(polarization: DipolePolarization, lens: LensSpec) -> float:
    """Fraction of all emitted photons that fall inside the lens aperture.

    At most 1/2 (the full forward hemisphere, reached for ``NA = 1``).
    """

    return _collected_power(polarization, lens.theta_max)


def fiber_overlap(polarization: DipolePolarization, lens: LensSpec, mode: GaussianMode) -> float:
    """Fraction of the *collected* light that couples into ``mode``.

    ``O = |∫ E_G · E_D*|² / η_col``, so ``η = η_col · O`` is the fiber-coupled
    fraction of all emission.  π light has a vanishing azimuthal integral and
    never couples.
    """

    collected = _collected_power(polarization, lens.theta_max)
    if collected <= 0.0:
        return 0.0
    coupled = _coupled_power(polarization, lens.theta_max, mode.waist / lens.focal_length)
    return min(1.0, coupled / collected)


def _aperture_scale(lens: LensSpec) -> float:
    if lens.is_limiting:
        return APERTURE_SCALE_CAP
    return min(lens.rho_na / lens.focal_length, APERTURE_SCALE_CAP)


def optimize_fiber_coupling(polarization: DipolePolarization, lens: LensSpec) -> FiberCoupling:
    """Choose the Gaussian waist that maximises the coupled fraction."""

    theta_max = lens.theta_max
    collected = _collected_power(polarization, theta_max)
    scale = _aperture_scale(lens)
    lower, upper = WAIST_BRACKET[0] * scale, WAIST_BRACKET[1] * scale

    best = golden_section_maximize(
        lambda w: _coupled_power(polarization, theta_max, w),
        lower,
        upper,
        rel_tol=WAIST_REL_TOL,
    )
    logger.debug(
        "NA=%.4f %s: waist/f=%.6g after %d evaluations",
        lens.numerical_aperture,
        polarization.value,
        best.x,
        best.evaluations,
    )
    efficiency = min(best.value, collected)
    overlap = efficiency / collected if collected > 0.0 else 0.0
    return FiberCoupling(
        waist=best.x * lens.focal_length,
        collection=collected,
        overlap=overlap,
        efficiency=efficiency,
    )


def fiber_coupled_efficiency(
    polarization: DipolePolarization, na: float, *, focal_length: float = 1e-3
) -> float:
    """``η = η_col · O`` maximised over the fiber-mode waist."""

    lens = LensSpec(numerical_aperture=na, focal_length=focal_length)
    return optimize_fiber_coupling(polarization, lens).efficiency


def cap_fraction(polarization: DipolePolarization, na: float) -> float:
    """Closed-form collection fraction, used as an independent check."""

    if not 0.0 <= na <= 1.0:
        raise ParameterError("na must lie in [0, 1]")
    c = math.sqrt(1.0 - na * na)
    if polarization is DipolePolarization.PI:
        return 0.75 * (2.0 / 3.0 - c + c**3 / 3.0)
    return 0.375 * ((1.0 - c) + (1.0 - c**3) / 3.0)


def hemisphere_fraction(polarization: DipolePolarization) -> float:
    """Forward-hemisphere share of the emission: 1/2 for every polarisation."""

    return cap_fraction(polarization, 1.0)


__all__ = [
    "DipolePolarization",
    "FiberCoupling",
    "GaussianMode",
    "LensSpec",
    "cap_fraction",
    "collection_fraction",
    "fiber_coupled_efficiency",
    "fiber_overlap",
    "hemisphere_fraction",
    "optimize_fiber_coupling",
]

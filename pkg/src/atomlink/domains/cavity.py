"""Cavity-QED figures of merit for two-mirror resonators.

Everything here is a closed-form expression of the resonator geometry, the
mirror coatings and the atomic line.  Rates are angular frequencies (rad/s)
throughout; divide by 2π only when presenting numbers.

The atomic dipole element is not an input: it follows from the linewidth via
the free-space spontaneous-emission relation, which turns the cooperativity
into the geometric expression ``C = 3 𝓕 λ² / (π³ w0²)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core.constants import EPSILON_0, HBAR, NM, SPEED_OF_LIGHT, TWO_PI, angular
from ..core.errors import ParameterError


@dataclass(frozen=True)
class AtomLine:
    """Optical transition: wavelength (m) and FWHM decay rate γ (rad/s)."""

    wavelength: float
    gamma_fwhm: float

    def __post_init__(self) -> None:
        if not self.wavelength > 0.0:
            raise ParameterError("wavelength must be positive")
        if not self.gamma_fwhm > 0.0:
            raise ParameterError("gamma_fwhm must be positive")

    @property
    def omega(self) -> float:
        return TWO_PI * SPEED_OF_LIGHT / self.wavelength

    @property
    def wavenumber(self) -> float:
        return TWO_PI / self.wavelength

    @property
    def dipole_element(self) -> float:
        """Transition dipole (C m) implied by ``γ = ω³ d² / (3π ε0 ħ c³)``."""

        omega = self.omega
        return math.sqrt(
            3.0 * math.pi * EPSILON_0 * HBAR * SPEED_OF_LIGHT**3 * self.gamma_fwhm / omega**3
        )


RB87_D2 = AtomLine(wavelength=780.0 * NM, gamma_fwhm=angular(6.07e6))


@dataclass(frozen=True)
class MirrorSet:
    """Power transmissions of both mirrors and the round-trip excess loss."""

    t_high: float
    t_low: float
    loss_rt: float

    def __post_init__(self) -> None:
        for name, value in (
            ("t_high", self.t_high),
            ("t_low", self.t_low),
            ("loss_rt", self.loss_rt),
        ):
            if not 0.0 <= value < 1.0:
                raise ParameterError(f"{name} must lie in [0, 1)")
        if self.total_loss >= 1.0:
            raise ParameterError("t_high + t_low + loss_rt must be below 1")

    @property
    def total_loss(self) -> float:
        return self.t_high + self.t_low + self.loss_rt

    @property
    def outcoupling_fraction(self) -> float:
        """Share of intracavity loss leaving through the high-transmission mirror."""

        return self.t_high / self.total_loss

    def with_t_high(self, t_high: float) -> MirrorSet:
        return MirrorSet(t_high=t_high, t_low=self.t_low, loss_rt=self.loss_rt)


@dataclass(frozen=True)
class CavityGeometry:
    """Symmetric two-mirror resonator of length ``length`` and mirror ROC ``mirror_roc``."""

    length: float
    mirror_roc: float

    def __post_init__(self) -> None:
        if not self.length > 0.0:
            raise ParameterError("length must be positive")
        if not self.mirror_roc > 0.0:
            raise ParameterError("mirror_roc must be positive")
        if self.stability**2 > 1.0:
            raise ParameterError(
                f"unstable resonator: s = {self.stability:.6g} (need 0 <= s^2 <= 1)"
            )

    @classmethod
    def from_critical_distance(cls, mirror_roc: float, d_crit: float) -> CavityGeometry:
        return cls(length=2.0 * mirror_roc - d_crit, mirror_roc=mirror_roc)

    @property
    def d_crit(self) -> float:
        """Distance of the mirrors from the concentric point, ``2 R_m - L``."""

        return 2.0 * self.mirror_roc - self.length

    @property
    def stability(self) -> float:
        """``s = 1 - L/R_m``."""

        return 1.0 - self.length / self.mirror_roc


@dataclass(frozen=True)
class CqedParams:
    """Derived cavity-QED parameters of one design (rates in rad/s)."""

    length: float
    finesse: float
    kappa_fwhm: float
    g: float
    gamma_fwhm: float
    cooperativity: float
    waist: float
    mode_volume: float
    vacuum_field: float

    @property
    def purcell_factor(self) -> float:
        """Enhancement ``1 + 2C`` of the decay rate into the cavity-coupled channel."""

        return 1.0 + 2.0 * self.cooperativity


def finesse(mirrors: MirrorSet) -> float:
    """Finesse of a cavity with imperfect mirrors.

    ``𝓕 = π p^{1/4} / (1 - p^{1/2})`` with ``p = (1-T_low)(1-T_high)(1-𝓛_RT)``.
    """

    if mirrors.total_loss == 0.0:
        raise ParameterError("finesse is unbounded for lossless mirrors")
    product = (1.0 - mirrors.t_low) * (1.0 - mirrors.t_high) * (1.0 - mirrors.loss_rt)
    return math.pi * product**0.25 / (1.0 - math.sqrt(product))


def kappa(length: float, finesse_value: float) -> float:
    """Cavity field decay rate (FWHM, rad/s): ``κ = π c / (L 𝓕)``."""

    if not length > 0.0:
        raise ParameterError("length must be positive")
    if not finesse_value > 0.0:
        raise ParameterError("finesse must be positive")
    return math.pi * SPEED_OF_LIGHT / (length * finesse_value)


def confocal_waist(length: float, line: AtomLine) -> float:
    return math.sqrt(length * line.wavelength / TWO_PI)


def near_concentric_waist(geom: CavityGeometry, line: AtomLine) -> float:
    """Mode waist ``w_c ((R_m - L/2)/(L/2))^{1/4}``; equals ``w_c`` for ``L = R_m``."""

    if geom.d_crit <= 0.0:
        raise ParameterError("concentric geometry (d_crit <= 0) has a vanishing waist")
    half = 0.5 * geom.length
    return confocal_waist(geom.length, line) * ((geom.mirror_roc - half) / half) ** 0.25


def mode_volume(waist: float, length: float) -> float:
    """Effective TEM00 mode volume ``π w0² L / 4``."""

    return math.pi * waist * waist * length / 4.0


def vacuum_field(line: AtomLine, volume: float) -> float:
    """Single-photon field amplitude ``(ħω / 2ε0V)^{1/2}`` in V/m."""

    return math.sqrt(HBAR * line.omega / (2.0 * EPSILON_0 * volume))


def cqed_params(geom: CavityGeometry, mirrors: MirrorSet, line: AtomLine) -> CqedParams:
    """Chain ``w0 -> V -> ℰ -> g`` and ``𝓕 -> κ -> C`` for one design."""

    waist = near_concentric_waist(geom, line)
    volume = mode_volume(waist, geom.length)
    field = vacuum_field(line, volume)
    g = line.dipole_element * field / HBAR
    finesse_value = finesse(mirrors)
    kappa_value = kappa(geom.length, finesse_value)
    cooperativity = 2.0 * g * g / (kappa_value * line.gamma_fwhm)
    return CqedParams(
        length=geom.length,
        finesse=finesse_value,
        kappa_fwhm=kappa_value,
        g=g,
        gamma_fwhm=line.gamma_fwhm,
        cooperativity=cooperativity,
        waist=waist,
        mode_volume=volume,
        vacuum_field=field,
    )


def free_spectral_range(length: float) -> float:
    """Longitudinal mode spacing ``c / 2L`` in Hz."""

    if not length > 0.0:
        raise ParameterError("length must be positive")
    return SPEED_OF_LIGHT / (2.0 * length)


def transverse_mode_spacing(geom: CavityGeometry) -> float:
    """Frequency gap (Hz) between TEM00 and the next transverse mode."""

    s = geom.stability
    if abs(s) > 1.0:
        raise ParameterError("|s| must not exceed 1")
    return free_spectral_range(geom.length) * (1.0 - math.acos(s) / math.pi)


def modes_resolved(geom: CavityGeometry, params: CqedParams) -> float:
    """Transverse mode spacing in units of the cavity linewidth κ/2π."""

    return transverse_mode_spacing(geom) / (params.kappa_fwhm / TWO_PI)


def mode_volume_ratio(
    reference: CavityGeometry, candidate: CavityGeometry, line: AtomLine
) -> float:
    """``V(reference) / V(candidate)``: the volume reduction of ``candidate``."""

    v_ref = mode_volume(near_concentric_waist(reference, line), reference.length)
    v_new = mode_volume(near_concentric_waist(candidate, line), candidate.length)
    return v_ref / v_new


__all__ = [
    "RB87_D2",
    "AtomLine",
    "CavityGeometry",
    "CqedParams",
    "MirrorSet",
    "confocal_waist",
    "cqed_params",
    "finesse",
    "free_spectral_range",
    "kappa",
    "mode_volume",
    "mode_volume_ratio",
    "modes_resolved",
    "near_concentric_waist",
    "transverse_mode_spacing",
    "vacuum_field",
]

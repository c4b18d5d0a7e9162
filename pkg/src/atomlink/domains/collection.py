"""Photon collection efficiencies for cavity and free-space interfaces.

For a two-level emitter the cavity efficiency is the product of three
probabilities: emission into the cavity mode, leaving the cavity before
re-absorption, and leaving through the out-coupling mirror.  For ⁸⁷Rb on the
``f'=0 -> f=1`` decay, the cavity additionally reshapes the branching ratios
because only the σ± channels are Purcell enhanced.

Fiber coupling from the TEM00 cavity mode is taken as unity and the
dipole/cavity-mode overlap factor is omitted (cavity waists are several
wavelengths wide).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core.errors import ParameterError
from .cavity import AtomLine, CqedParams, MirrorSet
from .dipole_optics import DipolePolarization, fiber_coupled_efficiency

FREE_SPACE_SIGMA_SHARE = 2.0 / 3.0


@dataclass(frozen=True)
class BranchingProbs:
    """Decay probabilities into the σ+, σ- and π channels."""

    p_plus: float
    p_minus: float
    p_pi: float

    def __post_init__(self) -> None:
        probabilities = (self.p_plus, self.p_minus, self.p_pi)
        if any(not 0.0 <= p <= 1.0 for p in probabilities):
            raise ParameterError("branching probabilities must lie in [0, 1]")
        if not math.isclose(math.fsum(probabilities), 1.0, abs_tol=1e-12):
            raise ParameterError("branching probabilities must sum to 1")

    @property
    def p_sigma(self) -> float:
        return self.p_plus

    @property
    def sigma_total(self) -> float:
        """``2 P_σ``: the share of decays emitting a cavity-coupled photon."""

        return self.p_plus + self.p_minus


def branching(c: float) -> BranchingProbs:
    """Purcell-modified branching: ``P± = (1+2C)/(3+4C)``, ``P_π = 1/(3+4C)``."""

    if c < 0.0:
        raise ParameterError("cooperativity must be non-negative")
    denominator = 3.0 + 4.0 * c
    p_sigma = (1.0 + 2.0 * c) / denominator
    return BranchingProbs(p_plus=p_sigma, p_minus=p_sigma, p_pi=1.0 / denominator)


def two_level_efficiency(params: CqedParams, mirrors: MirrorSet, line: AtomLine) -> float:
    """``η = 2C/(1+2C) · κ/(κ+γ) · T_high/(T_low+T_high+𝓛_RT)``."""

    c = params.cooperativity
    cavity_emission = 2.0 * c / (1.0 + 2.0 * c)
    escape = params.kappa_fwhm / (params.kappa_fwhm + line.gamma_fwhm)
    return cavity_emission * escape * mirrors.outcoupling_fraction


def rb_efficiency(params: CqedParams, mirrors: MirrorSet, line: AtomLine) -> float:
    """``η^(Rb) = 2 P_σ η``, the useful-photon efficiency for the Rb scheme."""

    return branching(params.cooperativity).sigma_total * two_level_efficiency(params, mirrors, line)


def rb_free_space_efficiency(na: float) -> float:
    """Fiber-coupled Rb efficiency of a lens: free-space σ share 2/3 times η(NA)."""

    return FREE_SPACE_SIGMA_SHARE * fiber_coupled_efficiency(DipolePolarization.SIGMA_PLUS, na)


__all__ = [
    "FREE_SPACE_SIGMA_SHARE",
    "BranchingProbs",
    "branching",
    "rb_efficiency",
    "rb_free_space_efficiency",
    "two_level_efficiency",
]

"""Atom-atom entanglement infidelity budget.

Budget entries add up (the usual error-budget convention); the product
``∏(1-εᵢ)`` is reported alongside as the multiplicative fidelity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Tuple, Union

from ..core.errors import ParameterError
from .cavity import AtomLine, CqedParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BudgetEntry:
    """One infidelity source.  ``verification_only`` entries come from reading
    the state out, not from the entangled state itself."""

    name: str
    infidelity: float
    verification_only: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.infidelity <= 1.0:
            raise ParameterError(f"{self.name}: infidelity must lie in [0, 1]")


EntryLike = Union[BudgetEntry, Tuple[str, float]]


@dataclass(frozen=True)
class FidelityBudget:
    entries: tuple[BudgetEntry, ...]
    total: float
    fidelity_product: float
    clamped: bool = False

    @property
    def fidelity(self) -> float:
        """Additive fidelity ``1 - total``."""

        return 1.0 - self.total

    def intrinsic(self) -> FidelityBudget:
        """Budget of the entangled state alone, without verification errors."""

        return compose_budget(e for e in self.entries if not e.verification_only)


def _as_entry(entry: EntryLike) -> BudgetEntry:
    if isinstance(entry, BudgetEntry):
        return entry
    name, infidelity = entry
    return BudgetEntry(name=name, infidelity=float(infidelity))


def compose_budget(entries: Iterable[EntryLike]) -> FidelityBudget:
    items = tuple(_as_entry(e) for e in entries)
    total = math.fsum(e.infidelity for e in items)
    product = math.prod(1.0 - e.infidelity for e in items)
    clamped = total > 1.0
    if clamped:
        logger.warning("infidelity total %.6g exceeds 1; clamped", total)
        total = 1.0
    return FidelityBudget(entries=items, total=total, fidelity_product=product, clamped=clamped)


def default_budget_entries() -> tuple[BudgetEntry, ...]:
    return (
        BudgetEntry("temporal_overlap", 0.05),
        BudgetEntry("spatial_overlap", 0.01),
        BudgetEntry("beamsplitter_waveplates", 0.002),
        BudgetEntry("qubit_rotation", 0.02, verification_only=True),
        BudgetEntry("state_readout", 0.06, verification_only=True),
        BudgetEntry("qubit_dephasing", 0.0),
        BudgetEntry("detector_dark_counts", 0.0),
        BudgetEntry("multi_photon_scattering", 0.0),
        BudgetEntry("off_resonant_excitation", 0.0),
    )


def temporal_overlap_error(
    params: CqedParams, line: AtomLine, displacement_1: float, displacement_2: float
) -> float:
    """Mismatch error ``(1 - ⟨α1|α2⟩)/2`` of two exponential photon wave packets.

    An atom displaced by ``z`` from the antinode couples with ``C cos²(kz)`` and
    decays at ``Γ = γ(1 + 2C cos²(kz))``.
    """

    if displacement_1 < 0.0 or displacement_2 < 0.0:
        raise ParameterError("displacements must be non-negative")
    k = line.wavenumber
    rates = [
        line.gamma_fwhm * (1.0 + 2.0 * params.cooperativity * math.cos(k * z) ** 2)
        for z in (displacement_1, displacement_2)
    ]
    overlap = 2.0 * math.sqrt(rates[0] * rates[1]) / (rates[0] + rates[1])
    return max(0.0, (1.0 - overlap) / 2.0)


def dephasing_error(delay: float, t2_star: float) -> float:
    """``1 - exp(-(t/T2*)²)``."""

    if not t2_star > 0.0:
        raise ParameterError("t2_star must be positive")
    return -math.expm1(-((delay / t2_star) ** 2))


def localization_precision(tweezer_waist: float, temperature: float, depth: float) -> float:
    """Position spread ``w √(k_B T / U)`` of a trapped atom.

    ``temperature`` and ``depth`` must share a unit (both in kelvin, or ``depth``
    given as ``U/k_B``).
    """

    if not tweezer_waist > 0.0:
        raise ParameterError("tweezer_waist must be positive")
    if temperature < 0.0:
        raise ParameterError("temperature must be non-negative")
    if not depth > 0.0:
        raise ParameterError("depth must be positive")
    return tweezer_waist * math.sqrt(temperature / depth)


__all__ = [
    "BudgetEntry",
    "FidelityBudget",
    "compose_budget",
    "default_budget_entries",
    "dephasing_error",
    "localization_precision",
    "temporal_overlap_error",
]

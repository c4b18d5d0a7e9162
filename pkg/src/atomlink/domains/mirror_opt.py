"""Out-coupling mirror optimisation and the parameter sweeps built on it.

``optimize_t_high`` maximises a collection efficiency over the transmission
of the out-coupling mirror with a golden-section search in ``log10 T_high``.
The efficiency is single-peaked in practice: a tiny ``T_high`` never lets the
photon out, a large one destroys the finesse.  A coarse grid scan guards the
search if the bracket does not look unimodal.

``sweep`` evaluates one variable (``t_high``, ``d_crit`` or ``na``) over a grid
with everything else held fixed, either re-optimising ``T_high`` at each point
or freezing it at the optimum of an anchor design.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from ..core.errors import AtomLinkError, OptimizationError, ParameterError
from ..core.numerics import golden_section_maximize
from ..core.observer import NoopObserver, Observer, ProgressEvent
from .cavity import RB87_D2, AtomLine, CavityGeometry, MirrorSet, cqed_params
from .collection import FREE_SPACE_SIGMA_SHARE, rb_efficiency, two_level_efficiency
from .dipole_optics import DipolePolarization, fiber_coupled_efficiency

logger = logging.getLogger(__name__)

LOG10_T_BOUNDS = (-6.0, -1.0)
T_HIGH_REL_TOL = 1e-5
FALLBACK_GRID_POINTS = 200
FLAT_THRESHOLD = 1e-12
DEFAULT_ANCHOR_D_CRIT = 10e-6


class EfficiencyObjective(str, Enum):
    TWO_LEVEL = "two_level"
    RB = "rb"


class SweepVariable(str, Enum):
    T_HIGH = "t_high"
    D_CRIT = "d_crit"
    NA = "na"


class TransmissionMode(str, Enum):
    """How ``T_high`` is chosen along a geometry sweep."""

    REOPTIMIZE = "reoptimize"
    FROZEN = "frozen"


@dataclass(frozen=True)
class OptimizationResult:
    t_high_opt: float
    eta_opt: float
    evaluations: int
    used_fallback: bool = False


def efficiency(
    geom: CavityGeometry,
    mirrors: MirrorSet,
    line: AtomLine,
    objective: EfficiencyObjective = EfficiencyObjective.RB,
) -> float:
    params = cqed_params(geom, mirrors, line)
    if objective is EfficiencyObjective.RB:
        return rb_efficiency(params, mirrors, line)
    return two_level_efficiency(params, mirrors, line)


def optimize_t_high(
    geom: CavityGeometry,
    t_low: float,
    loss_rt: float,
    line: AtomLine = RB87_D2,
    objective: EfficiencyObjective = EfficiencyObjective.RB,
    *,
    rel_tol: float = T_HIGH_REL_TOL,
) -> OptimizationResult:
    """Maximise the chosen efficiency over ``T_high ∈ [1 ppm, 0.1]``.

    The upper end is clipped below ``1 - t_low - loss_rt`` when the other
    losses leave less room.
    """

    for name, value in (("t_low", t_low), ("loss_rt", loss_rt)):
        if not 0.0 < value < 1.0:
            raise ParameterError(f"{name} must lie in (0, 1)")
    objective = EfficiencyObjective(objective)

    def eta_of_log(log_t: float) -> float:
        mirrors = MirrorSet(t_high=10.0**log_t, t_low=t_low, loss_rt=loss_rt)
        return efficiency(geom, mirrors, line, objective)

    lo, hi = LOG10_T_BOUNDS
    headroom = 1.0 - t_low - loss_rt
    if headroom <= 10.0**lo:
        raise ParameterError("t_low + loss_rt leave no room for T_high above 1 ppm")
    hi = min(hi, math.log10(headroom * (1.0 - 1e-9)))
    abs_tol = rel_tol / math.log(10.0)
    span = hi - lo
    probes = (lo + 0.381966011250105 * span, lo + 0.618033988749895 * span)
    edge_values = (eta_of_log(lo), eta_of_log(hi))
    probe_values = tuple(eta_of_log(u) for u in probes)
    evaluations = 4

    if max(edge_values + probe_values) < FLAT_THRESHOLD:
        raise OptimizationError("efficiency is below 1e-12 over the whole T_high range")

    used_fallback = max(probe_values) <= max(edge_values)
    if used_fallback:
        logger.info("T_high bracket not unimodal; scanning %d grid points", FALLBACK_GRID_POINTS)
        grid = np.linspace(lo, hi, FALLBACK_GRID_POINTS)
        values = [eta_of_log(float(u)) for u in grid]
        evaluations += len(values)
        best = int(np.argmax(values))
        if max(values) < FLAT_THRESHOLD:
            raise OptimizationError("efficiency is below 1e-12 over the whole T_high range")
        lo = float(grid[max(best - 1, 0)])
        hi = float(grid[min(best + 1, len(grid) - 1)])

    result = golden_section_maximize(eta_of_log, lo, hi, rel_tol=0.0, abs_tol=abs_tol)
    evaluations += result.evaluations
    return OptimizationResult(
        t_high_opt=10.0**result.x,
        eta_opt=result.value,
        evaluations=evaluations,
        used_fallback=used_fallback,
    )


@dataclass(frozen=True)
class HeldFixed:
    """Configuration held constant along a sweep.

    Geometry is given either by ``length`` or by ``d_crit`` together with
    ``mirror_roc``; ``t_high`` optionally pins the out-coupler.
    """

    line: AtomLine = RB87_D2
    t_low: float = 10e-6
    loss_rt: float = 40e-6
    mirror_roc: Optional[float] = None
    length: Optional[float] = None
    d_crit: Optional[float] = None
    t_high: Optional[float] = None

    def geometry(self) -> CavityGeometry:
        if self.mirror_roc is None:
            raise ParameterError("held_fixed.mirror_roc is required for cavity sweeps")
        if self.length is not None:
            return CavityGeometry(length=self.length, mirror_roc=self.mirror_roc)
        if self.d_crit is not None:
            return CavityGeometry.from_critical_distance(self.mirror_roc, self.d_crit)
        raise ParameterError("held_fixed needs either length or d_crit")


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    lo: float
    hi: float
    points: int
    held_fixed: HeldFixed = HeldFixed()
    t_high_mode: TransmissionMode = TransmissionMode.REOPTIMIZE
    objective: EfficiencyObjective = EfficiencyObjective.RB
    anchor_d_crit: float = DEFAULT_ANCHOR_D_CRIT
    log_spacing: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "variable", SweepVariable(self.variable))
        object.__setattr__(self, "t_high_mode", TransmissionMode(self.t_high_mode))
        object.__setattr__(self, "objective", EfficiencyObjective(self.objective))
        if not self.lo < self.hi:
            raise ParameterError("sweep range must satisfy lo < hi")
        if self.points < 2:
            raise ParameterError("a sweep needs at least two points")
        if self.log_spacing and self.lo <= 0.0:
            raise ParameterError("log-spaced sweeps need a positive lower bound")

    def grid(self) -> np.ndarray:
        if self.log_spacing:
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class SweepRow:
    value: float
    t_high: float
    eta: float
    eta_rb: float
    cooperativity: float
    finesse: float
    kappa_fwhm: float
    valid: bool = True

    @classmethod
    def invalid(cls, value: float) -> SweepRow:
        nan = math.nan
        return cls(value, nan, nan, nan, nan, nan, nan, valid=False)


@dataclass(frozen=True)
class SweepTable:
    variable: SweepVariable
    rows: tuple[SweepRow, ...]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.rows], dtype=float)


def _cavity_row(
    value: float, geom: CavityGeometry, mirrors: MirrorSet, line: AtomLine
) -> SweepRow:
    params = cqed_params(geom, mirrors, line)
    return SweepRow(
        value=value,
        t_high=mirrors.t_high,
        eta=two_level_efficiency(params, mirrors, line),
        eta_rb=rb_efficiency(params, mirrors, line),
        cooperativity=params.cooperativity,
        finesse=params.finesse,
        kappa_fwhm=params.kappa_fwhm,
    )


def _frozen_t_high(spec: SweepSpec) -> float:
    held = spec.held_fixed
    if held.t_high is not None:
        return held.t_high
    if held.mirror_roc is None:
        raise ParameterError("held_fixed.mirror_roc is required for cavity sweeps")
    anchor = CavityGeometry.from_critical_distance(held.mirror_roc, spec.anchor_d_crit)
    return optimize_t_high(anchor, held.t_low, held.loss_rt, held.line, spec.objective).t_high_opt


def _evaluate_point(spec: SweepSpec, value: float, frozen_t_high: Optional[float]) -> SweepRow:
    held = spec.held_fixed
    if spec.variable is SweepVariable.NA:
        eta = fiber_coupled_efficiency(DipolePolarization.SIGMA_PLUS, value)
        return SweepRow(
            value=value,
            t_high=math.nan,
            eta=eta,
            eta_rb=FREE_SPACE_SIGMA_SHARE * eta,
            cooperativity=math.nan,
            finesse=math.nan,
            kappa_fwhm=math.nan,
        )
    if spec.variable is SweepVariable.T_HIGH:
        mirrors = MirrorSet(t_high=value, t_low=held.t_low, loss_rt=held.loss_rt)
        return _cavity_row(value, held.geometry(), mirrors, held.line)

    if held.mirror_roc is None:
        raise ParameterError("held_fixed.mirror_roc is required for d_crit sweeps")
    geom = CavityGeometry.from_critical_distance(held.mirror_roc, value)
    if frozen_t_high is not None:
        t_high = frozen_t_high
    else:
        result = optimize_t_high(geom, held.t_low, held.loss_rt, held.line, spec.objective)
        t_high = result.t_high_opt
    mirrors = MirrorSet(t_high=t_high, t_low=held.t_low, loss_rt=held.loss_rt)
    return _cavity_row(value, geom, mirrors, held.line)


def _safe_point(spec: SweepSpec, value: float, frozen_t_high: Optional[float]) -> SweepRow:
    try:
        return _evaluate_point(spec, value, frozen_t_high)
    except AtomLinkError as exc:
        logger.warning("sweep point %s=%g invalid: %s", spec.variable.value, value, exc)
        return SweepRow.invalid(value)


def sweep(
    spec: SweepSpec, *, workers: int = 1, observer: Optional[Observer] = None
) -> SweepTable:
    """Evaluate ``spec`` point by point; rows keep grid order for any ``workers``.

    A point that violates a precondition becomes an invalid (NaN) row instead
    of aborting the sweep.
    """

    observer = observer or NoopObserver()
    frozen = None
    if spec.variable is SweepVariable.D_CRIT and spec.t_high_mode is TransmissionMode.FROZEN:
        frozen = _frozen_t_high(spec)

    grid: Sequence[float] = [float(v) for v in spec.grid()]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _safe_point(spec, v, frozen), grid))
    else:
        rows = [_safe_point(spec, v, frozen) for v in grid]

    for index, row in enumerate(rows):
        event = ProgressEvent.POINT_EVALUATED if row.valid else ProgressEvent.POINT_INVALID
        observer(event, {"index": index, spec.variable.value: row.value})
    observer(ProgressEvent.SWEEP_COMPLETE, {"points": len(rows)}, variable=spec.variable.value)
    return SweepTable(variable=spec.variable, rows=tuple(rows))


__all__ = [
    "DEFAULT_ANCHOR_D_CRIT",
    "EfficiencyObjective",
    "HeldFixed",
    "OptimizationResult",
    "SweepRow",
    "SweepSpec",
    "SweepTable",
    "SweepVariable",
    "T_HIGH_REL_TOL",
    "TransmissionMode",
    "efficiency",
    "optimize_t_high",
    "sweep",
]

"""Datasets behind the efficiency and rate figures.

Each builder returns a :class:`~atomlink.tables.Table` holding the x grid and
every curve needed to re-plot the figure.  Nothing is rendered.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional

import numpy as np

from .config import RunConfig
from .core.constants import MM, PPM, UM
from .core.observer import Observer
from .domains.dipole_optics import (
    DipolePolarization,
    LensSpec,
    collection_fraction,
    optimize_fiber_coupling,
)
from .domains.entangle import RateConvention, entanglement_rate, p_atom_atom
from .domains.mirror_opt import (
    EfficiencyObjective,
    HeldFixed,
    SweepSpec,
    SweepTable,
    SweepVariable,
    TransmissionMode,
    sweep,
)
from .tables import Table, table_from_columns

logger = logging.getLogger(__name__)

FigureBuilder = Callable[..., Table]


def _cavity_tag(mirror_roc_mm: float) -> str:
    return f"L{2.0 * mirror_roc_mm:g}mm"


def _lens_tag(na: float) -> str:
    return f"lens_na{na:g}"


def fig2(config: RunConfig, *, workers: int = 1, observer: Optional[Observer] = None) -> Table:
    """Free-space and fiber-coupled σ collection versus NA."""

    spec = config.sweeps.na
    grid = np.linspace(spec.lo, spec.hi, spec.points)
    free_space, coupled, overlap = [], [], []
    for na in grid:
        lens = LensSpec(numerical_aperture=float(na))
        free_space.append(collection_fraction(DipolePolarization.SIGMA_PLUS, lens))
        result = optimize_fiber_coupling(DipolePolarization.SIGMA_PLUS, lens)
        coupled.append(result.efficiency)
        overlap.append(result.overlap)
    return table_from_columns(
        "Collection efficiency of a lens versus NA",
        [
            ("na", [float(na) for na in grid]),
            ("free_space", free_space),
            ("fiber_coupled", coupled),
            ("mode_overlap", overlap),
        ],
    )


def fig3(config: RunConfig, *, workers: int = 1, observer: Optional[Observer] = None) -> Table:
    """Two-level efficiency versus out-coupler transmission for several lengths."""

    spec = config.sweeps.t_high
    line = config.line()
    columns: list[tuple[str, list[float]]] = []
    for length_mm in spec.lengths_mm:
        roc_mm = 0.5 * (length_mm + spec.d_crit_um * UM / MM)
        held = HeldFixed(
            line=line,
            t_low=config.mirrors.t_low_ppm * PPM,
            loss_rt=config.mirrors.loss_rt_ppm * PPM,
            mirror_roc=roc_mm * MM,
            length=length_mm * MM,
        )
        table = sweep(
            SweepSpec(
                variable=SweepVariable.T_HIGH,
                lo=spec.lo_ppm * PPM,
                hi=spec.hi_ppm * PPM,
                points=spec.points,
                held_fixed=held,
                log_spacing=True,
            ),
            workers=workers,
            observer=observer,
        )
        if not columns:
            columns.append(("t_high_ppm", [v / PPM for v in table.column("value")]))
        columns.append((f"eta_L{length_mm:g}mm", table.column("eta").tolist()))
    return table_from_columns("Two-level efficiency versus T_high", columns)


def _d_crit_sweeps(
    config: RunConfig,
    objective: EfficiencyObjective,
    workers: int,
    observer: Optional[Observer],
) -> list[tuple[float, SweepTable, SweepTable]]:
    spec = config.sweeps.d_crit
    line = config.line()
    out = []
    for roc_mm in spec.mirror_rocs_mm:
        held = HeldFixed(
            line=line,
            t_low=config.mirrors.t_low_ppm * PPM,
            loss_rt=config.mirrors.loss_rt_ppm * PPM,
            mirror_roc=roc_mm * MM,
        )
        tables = []
        for mode in (TransmissionMode.REOPTIMIZE, TransmissionMode.FROZEN):
            tables.append(
                sweep(
                    SweepSpec(
                        variable=SweepVariable.D_CRIT,
                        lo=spec.lo_um * UM,
                        hi=spec.hi_um * UM,
                        points=spec.points,
                        held_fixed=held,
                        t_high_mode=mode,
                        objective=objective,
                        anchor_d_crit=spec.anchor_um * UM,
                        log_spacing=spec.log_spacing,
                    ),
                    workers=workers,
                    observer=observer,
                )
            )
        out.append((roc_mm, tables[0], tables[1]))
    return out


def _lens_efficiencies(config: RunConfig) -> dict[float, float]:
    return {
        na: optimize_fiber_coupling(DipolePolarization.SIGMA_PLUS, LensSpec(na)).efficiency
        for na in config.lens_na
    }


def _d_crit_axis(config: RunConfig) -> list[float]:
    spec = config.sweeps.d_crit
    lo, hi = spec.lo_um * UM, spec.hi_um * UM
    spacing = np.geomspace if spec.log_spacing else np.linspace
    grid = spacing(lo, hi, spec.points)
    return [float(v) / UM for v in grid]


def _efficiency_figure(
    config: RunConfig,
    objective: EfficiencyObjective,
    column: str,
    lens_scale: float,
    title: str,
    workers: int,
    observer: Optional[Observer],
) -> Table:
    axis = _d_crit_axis(config)
    columns: list[tuple[str, list[float]]] = [("d_crit_um", axis)]
    for roc_mm, reopt, frozen in _d_crit_sweeps(config, objective, workers, observer):
        tag = _cavity_tag(roc_mm)
        columns.append((f"{column}_{tag}_opt", reopt.column(column).tolist()))
        columns.append((f"{column}_{tag}_frozen", frozen.column(column).tolist()))
    for na, eta in _lens_efficiencies(config).items():
        columns.append((_lens_tag(na), [lens_scale * eta] * len(axis)))
    return table_from_columns(title, columns)


def fig4(config: RunConfig, *, workers: int = 1, observer: Optional[Observer] = None) -> Table:
    """Two-level cavity efficiency versus d_crit, with lens reference lines."""

    return _efficiency_figure(
        config,
        EfficiencyObjective.TWO_LEVEL,
        "eta",
        1.0,
        "Cavity versus lens collection efficiency",
        workers,
        observer,
    )


def fig6(config: RunConfig, *, workers: int = 1, observer: Optional[Observer] = None) -> Table:
    """Rb-scheme efficiency versus d_crit; lens lines carry the free-space 2/3 share."""

    return _efficiency_figure(
        config,
        EfficiencyObjective.RB,
        "eta_rb",
        2.0 / 3.0,
        "Cavity versus lens collection efficiency for the Rb scheme",
        workers,
        observer,
    )


def _rate(eta_rb: float, config: RunConfig) -> float:
    if math.isnan(eta_rb):
        return math.nan
    p_aa = p_atom_atom(eta_rb, config.detection.build())
    if p_aa <= 0.0:
        return 0.0
    convention = RateConvention(config.simulation.convention)
    return entanglement_rate(p_aa, config.timings.build(), convention)


def fig7(config: RunConfig, *, workers: int = 1, observer: Optional[Observer] = None) -> Table:
    """Entanglement rate along the Rb-scheme efficiency curves."""

    efficiency = fig6(config, workers=workers, observer=observer)
    d_crit = [float(v) for v in efficiency.column("d_crit_um")]
    columns: list[tuple[str, list[float]]] = [("d_crit_um", d_crit)]
    for name in efficiency.columns[1:]:
        label = name.replace("eta_rb_", "rate_") if name.startswith("eta_rb_") else f"rate_{name}"
        rates = [_rate(float(v), config) for v in efficiency.column(name)]
        columns.append((label, rates))
    return table_from_columns("Atom-atom entanglement rate (1/s)", columns)


FIGURES: dict[str, FigureBuilder] = {
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig6": fig6,
    "fig7": fig7,
}


def build_figure(
    name: str, config: RunConfig, *, workers: int = 1, observer: Optional[Observer] = None
) -> Table:
    try:
        builder = FIGURES[name]
    except KeyError:
        raise KeyError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}") from None
    logger.info("building %s", name)
    return builder(config, workers=workers, observer=observer)


__all__ = ["FIGURES", "build_figure", "fig2", "fig3", "fig4", "fig6", "fig7"]

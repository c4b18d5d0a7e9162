"""Tables produced by the command line: design summary, optimisation, budget, simulation."""

from __future__ import annotations

import math

from .config import RunConfig
from .core.constants import MHZ, MM, NM, PPM, UM, US, MS, cyclic
from .domains.cavity import cqed_params
from .domains.collection import rb_efficiency
from .domains.entangle import (
    McResult,
    RateConvention,
    analytic_entanglement_time,
    design_efficiency,
    expected_pair_lifetime,
    p_atom_atom,
    verification_duration,
    verification_success,
)
from .domains.fidelity import (
    FidelityBudget,
    compose_budget,
    dephasing_error,
    temporal_overlap_error,
)
from .domains.mirror_opt import EfficiencyObjective, optimize_t_high
from .tables import Table

TABLE2_COLUMNS = (
    "design",
    "length_mm",
    "mirror_roc_mm",
    "w0_um",
    "t_high_ppm",
    "finesse",
    "cooperativity",
    "g_2pi_mhz",
    "kappa_2pi_mhz",
    "gamma_2pi_mhz",
    "eta_rb",
    "p_aa",
)


def table2(config: RunConfig) -> Table:
    """Cavity parameters of every configured design, ``T_high`` optimised for Rb."""

    line = config.line()
    chain = config.detection.build()
    rows = []
    for design in config.cavity_designs():
        mirrors = design.resolve_mirrors(line)
        params = cqed_params(design.geometry(), mirrors, line)
        eta_rb = rb_efficiency(params, mirrors, line)
        rows.append(
            (
                design.name,
                design.length / MM,
                design.mirror_roc / MM,
                params.waist / UM,
                mirrors.t_high / PPM,
                params.finesse,
                params.cooperativity,
                cyclic(params.g) / MHZ,
                cyclic(params.kappa_fwhm) / MHZ,
                cyclic(params.gamma_fwhm) / MHZ,
                eta_rb,
                p_atom_atom(eta_rb, chain),
            )
        )
    return Table(TABLE2_COLUMNS, tuple(rows), title="Cavity parameters optimised for 87Rb")


def optimize(config: RunConfig, objective: EfficiencyObjective = EfficiencyObjective.RB) -> Table:
    line = config.line()
    rows = []
    for design in config.cavity_designs():
        result = optimize_t_high(design.geometry(), design.t_low, design.loss_rt, line, objective)
        rows.append(
            (
                design.name,
                objective.value,
                result.t_high_opt / PPM,
                result.eta_opt,
                result.evaluations,
                result.used_fallback,
            )
        )
    return Table(
        ("design", "objective", "t_high_ppm", "eta_opt", "evaluations", "grid_fallback"),
        tuple(rows),
        title="Optimal out-coupler transmission",
    )


def budget(config: RunConfig) -> tuple[FidelityBudget, Table]:
    """Infidelity budget plus the modelled temporal-overlap and dephasing terms."""

    budget_ = compose_budget(entry.build() for entry in config.fidelity.entries)
    intrinsic = budget_.intrinsic()
    rows: list[tuple[object, ...]] = [
        (entry.name, entry.infidelity * 100.0, entry.verification_only) for entry in budget_.entries
    ]
    rows.append(("total", budget_.total * 100.0, False))
    rows.append(("fidelity_additive", budget_.fidelity * 100.0, False))
    rows.append(("fidelity_product", budget_.fidelity_product * 100.0, False))
    rows.append(("intrinsic_total", intrinsic.total * 100.0, False))

    fidelity = config.fidelity
    line = config.line()
    designs = config.cavity_designs()
    for design in designs:
        mirrors = design.resolve_mirrors(line)
        params = cqed_params(design.geometry(), mirrors, line)
        error = temporal_overlap_error(
            params, line, fidelity.displacement_1_nm * NM, fidelity.displacement_2_nm * NM
        )
        rows.append((f"model_temporal_overlap_{design.name}", error * 100.0, False))
    rows.append(
        (
            "model_dephasing",
            dephasing_error(fidelity.dephasing_delay_us * US, fidelity.t2_star_ms * MS) * 100.0,
            False,
        )
    )
    table = Table(
        ("source", "infidelity_percent", "verification_only"),
        tuple(rows),
        title="Atom-atom entanglement infidelity budget",
    )
    return budget_, table


def resolve_p_aa(config: RunConfig) -> float:
    """Configured ``p_aa``, or the value of the first design when unset."""

    if config.simulation.p_aa is not None:
        return config.simulation.p_aa
    design = config.cavity_designs()[0]
    return p_atom_atom(design_efficiency(design, config.line()), config.detection.build())


def simulation(config: RunConfig, p_aa: float, result: McResult) -> Table:
    timings = config.timings.build()
    analytic = {
        convention: analytic_entanglement_time(p_aa, timings, convention)
        for convention in RateConvention
    }
    rows = (
        ("p_aa", p_aa),
        ("trials", result.trials),
        ("seed", config.simulation.seed),
        ("include_loss", config.simulation.include_loss),
        ("mean_time_s", result.mean_time_to_entanglement),
        ("ci95_halfwidth_s", result.confidence_halfwidth),
        ("rate_per_s", result.rate),
        ("mean_attempts", result.mean_attempts),
        ("mean_epochs", result.mean_epochs),
        ("reload_events", result.reload_events),
        ("analytic_exact_time_s", analytic[RateConvention.EXACT]),
        ("analytic_epoch_time_s", analytic[RateConvention.EPOCH]),
        ("deviation_from_exact_sigma", _sigma_distance(result, analytic[RateConvention.EXACT])),
        ("pair_lifetime_s", expected_pair_lifetime(timings)),
        ("verification_duration_s", verification_duration(timings)),
        ("verification_success", verification_success(timings)),
    )
    return Table(("quantity", "value"), rows, title="Entanglement generation Monte Carlo")


def _sigma_distance(result: McResult, expected: float) -> float:
    if result.standard_error == 0.0:
        agrees = math.isclose(result.mean_time_to_entanglement, expected, rel_tol=1e-12)
        return 0.0 if agrees else math.inf
    return (result.mean_time_to_entanglement - expected) / result.standard_error


__all__ = ["TABLE2_COLUMNS", "budget", "optimize", "resolve_p_aa", "simulation", "table2"]

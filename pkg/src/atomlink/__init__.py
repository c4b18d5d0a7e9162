"""Neutral-atom quantum network link: cavity and free-space photon interfaces."""

from __future__ import annotations

from importlib import metadata as _importlib_metadata
from pathlib import Path
import tomllib
from typing import Any

from .core import (
    AtomLinkError,
    ConfigError,
    LoggingObserver,
    NoopObserver,
    NumericalError,
    Observer,
    OptimizationError,
    ParameterError,
    ProgressEvent,
    QuadratureError,
    combine_observers,
)
from .domains.cavity import (
    RB87_D2,
    AtomLine,
    CavityGeometry,
    CqedParams,
    MirrorSet,
    cqed_params,
    finesse,
    free_spectral_range,
    kappa,
    mode_volume_ratio,
    modes_resolved,
    near_concentric_waist,
    transverse_mode_spacing,
)
from .domains.collection import (
    BranchingProbs,
    branching,
    rb_efficiency,
    rb_free_space_efficiency,
    two_level_efficiency,
)
from .domains.dipole_optics import (
    DipolePolarization,
    GaussianMode,
    LensSpec,
    collection_fraction,
    fiber_coupled_efficiency,
    fiber_overlap,
    optimize_fiber_coupling,
)
from .domains.entangle import (
    CavityDesign,
    DetectionChain,
    LensDesign,
    McResult,
    ProtocolTimings,
    RateConvention,
    analytic_entanglement_time,
    entanglement_rate,
    p_atom_atom,
    rate_sweep,
    simulate,
)
from .domains.fidelity import (
    BudgetEntry,
    FidelityBudget,
    compose_budget,
    default_budget_entries,
    dephasing_error,
    temporal_overlap_error,
)
from .domains.mirror_opt import (
    EfficiencyObjective,
    OptimizationResult,
    SweepSpec,
    SweepVariable,
    optimize_t_high,
    sweep,
)


_DISTRIBUTION = "atom-cavity-link"


def _source_tree_version() -> str | None:
    """Version declared by the checkout's ``pyproject.toml`` when not installed."""

    manifests = (parent / "pyproject.toml" for parent in Path(__file__).resolve().parents)
    manifest = next((path for path in manifests if path.is_file()), None)
    if manifest is None:
        return None
    try:
        document: dict[str, Any] = tomllib.loads(manifest.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError):  # pragma: no cover
        return None
    project = document.get("project")
    declared = project.get("version") if isinstance(project, dict) else None
    return declared if isinstance(declared, str) else None


try:
    __version__ = _importlib_metadata.version(_DISTRIBUTION)
except _importlib_metadata.PackageNotFoundError:
    __version__ = _source_tree_version() or "0.0.0"

__all__ = [
    "RB87_D2",
    "AtomLine",
    "AtomLinkError",
    "BranchingProbs",
    "BudgetEntry",
    "CavityDesign",
    "CavityGeometry",
    "ConfigError",
    "CqedParams",
    "DetectionChain",
    "DipolePolarization",
    "EfficiencyObjective",
    "FidelityBudget",
    "GaussianMode",
    "LensDesign",
    "LensSpec",
    "LoggingObserver",
    "McResult",
    "MirrorSet",
    "NoopObserver",
    "NumericalError",
    "Observer",
    "OptimizationError",
    "OptimizationResult",
    "ParameterError",
    "ProgressEvent",
    "ProtocolTimings",
    "QuadratureError",
    "RateConvention",
    "SweepSpec",
    "SweepVariable",
    "analytic_entanglement_time",
    "branching",
    "collection_fraction",
    "combine_observers",
    "compose_budget",
    "cqed_params",
    "default_budget_entries",
    "dephasing_error",
    "entanglement_rate",
    "fiber_coupled_efficiency",
    "fiber_overlap",
    "finesse",
    "free_spectral_range",
    "kappa",
    "mode_volume_ratio",
    "modes_resolved",
    "near_concentric_waist",
    "optimize_fiber_coupling",
    "optimize_t_high",
    "p_atom_atom",
    "rate_sweep",
    "rb_efficiency",
    "rb_free_space_efficiency",
    "simulate",
    "sweep",
    "temporal_overlap_error",
    "transverse_mode_spacing",
    "two_level_efficiency",
    "__version__",
]

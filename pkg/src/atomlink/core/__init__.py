"""Shared kernel: constants, numerics, observers and the error hierarchy."""

from .errors import (
    AtomLinkError,
    ConfigError,
    NumericalError,
    OptimizationError,
    ParameterError,
    QuadratureError,
)
from .numerics import (
    QuadratureResult,
    ScalarMaximum,
    adaptive_gauss_legendre,
    composite_gauss_legendre,
    golden_section_maximize,
    periodic_trapezoid_nodes,
)
from .observer import LoggingObserver, NoopObserver, Observer, ProgressEvent, combine_observers

__all__ = [
    "AtomLinkError",
    "ConfigError",
    "LoggingObserver",
    "NoopObserver",
    "NumericalError",
    "Observer",
    "OptimizationError",
    "ParameterError",
    "ProgressEvent",
    "QuadratureError",
    "QuadratureResult",
    "ScalarMaximum",
    "adaptive_gauss_legendre",
    "combine_observers",
    "composite_gauss_legendre",
    "golden_section_maximize",
    "periodic_trapezoid_nodes",
]

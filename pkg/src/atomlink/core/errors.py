"""Exception hierarchy shared by every atomlink module.

Precondition violations derive from :class:`ValueError` so callers that only
know the standard library still catch them; numerical failures derive from
:class:`ArithmeticError`.  The command line maps the two branches onto
distinct exit codes.
"""

from __future__ import annotations


class AtomLinkError(Exception):
    """Base class for all errors raised by atomlink."""


class ParameterError(AtomLinkError, ValueError):
    """An input violates a documented precondition or invariant."""


class ConfigError(ParameterError):
    """A configuration document is malformed.

    ``key_path`` holds the dotted location of the offending entry (for example
    ``timings.t_pump_us``) so the CLI can point at it.
    """

    def __init__(self, key_path: str, message: str) -> None:
        self.key_path = key_path
        self.message = message
        super().__init__(f"{key_path}: {message}" if key_path else message)


class NumericalError(AtomLinkError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach its tolerance at maximum refinement."""


class OptimizationError(NumericalError):
    """A scalar optimisation had nothing to optimise (flat objective)."""


__all__ = [
    "AtomLinkError",
    "ConfigError",
    "NumericalError",
    "OptimizationError",
    "ParameterError",
    "QuadratureError",
]

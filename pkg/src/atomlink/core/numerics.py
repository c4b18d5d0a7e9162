"""Small numerical kernels: composite Gauss-Legendre quadrature and
golden-section maximisation.

Both routines are deliberately dependency-light (NumPy only) and
deterministic: the same inputs always produce the same sequence of function
evaluations, which keeps sweep tables byte-identical between runs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ParameterError, QuadratureError

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@lru_cache(maxsize=16)
def _legendre_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    panels: int
    error_estimate: float


def composite_gauss_legendre(
    fn: ArrayFn, lower: float, upper: float, panels: int, *, order: int = 8
) -> complex:
    """Integrate ``fn`` over ``[lower, upper]`` with ``panels`` equal panels."""

    nodes, weights = _legendre_rule(order)
    edges = np.linspace(lower, upper, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    points = mid[:, None] + half[:, None] * nodes[None, :]
    values = np.asarray(fn(points.ravel())).reshape(points.shape)
    return complex(np.sum(values * weights[None, :] * half[:, None]))


def adaptive_gauss_legendre(
    fn: ArrayFn,
    lower: float,
    upper: float,
    *,
    atol: float = 1e-8,
    order: int = 8,
    max_panels: int = 2**14,
) -> QuadratureResult:
    """Refine a composite Gauss-Legendre rule by panel doubling.

    Refinement stops once two successive levels agree to ``atol``.  Raises
    :class:`QuadratureError` when ``max_panels`` is reached first.
    """

    if not upper > lower:
        raise ParameterError("integration interval must have upper > lower")
    if atol <= 0:
        raise ParameterError("atol must be positive")

    panels = 1
    previous = composite_gauss_legendre(fn, lower, upper, panels, order=order)
    delta = math.inf
    while panels < max_panels:
        panels *= 2
        current = composite_gauss_legendre(fn, lower, upper, panels, order=order)
        delta = abs(current - previous)
        if delta <= atol:
            logger.debug("quadrature converged with %d panels (delta=%.3g)", panels, delta)
            return QuadratureResult(value=current, panels=panels, error_estimate=delta)
        previous = current
    raise QuadratureError(
        f"quadrature did not reach atol={atol:g} with {max_panels} panels (last delta={delta:.3g})"
    )


def periodic_trapezoid_nodes(points: int) -> tuple[np.ndarray, float]:
    """Uniform azimuthal nodes on ``[0, 2π)`` and the common trapezoid weight.

    The rule is exact for trigonometric polynomials of degree below ``points``.
    """

    if points < 2:
        raise ParameterError("at least two azimuthal points are required")
    phi = np.arange(points) * (2.0 * math.pi / points)
    return phi, 2.0 * math.pi / points


@dataclass(frozen=True)
class ScalarMaximum:
    x: float
    value: float
    evaluations: int


def golden_section_maximize(
    fn: Callable[[float], float],
    lower: float,
    upper: float,
    *,
    rel_tol: float = 1e-6,
    abs_tol: float = 0.0,
    max_iter: int = 500,
) -> ScalarMaximum:
    """Derivative-free maximisation of a unimodal ``fn`` on ``[lower, upper]``.

    Iterates until the bracket width drops below
    ``max(abs_tol, rel_tol * |midpoint|)``.  The returned value is the best
    function value actually evaluated, so ``fn(result.x) == result.value``.
    """

    if not upper > lower:
        raise ParameterError("golden-section bracket must have upper > lower")

    a, b = float(lower), float(upper)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    evaluations = 2

    for _ in range(max_iter):
        if b - a <= max(abs_tol, rel_tol * abs(0.5 * (a + b))):
            break
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
        else:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        evaluations += 1

    mid = 0.5 * (a + b)
    fmid = fn(mid)
    evaluations += 1
    best_x, best_value = max(((mid, fmid), (c, fc), (d, fd)), key=lambda item: item[1])
    return ScalarMaximum(x=best_x, value=best_value, evaluations=evaluations)


__all__ = [
    "QuadratureResult",
    "ScalarMaximum",
    "adaptive_gauss_legendre",
    "composite_gauss_legendre",
    "golden_section_maximize",
    "periodic_trapezoid_nodes",
]

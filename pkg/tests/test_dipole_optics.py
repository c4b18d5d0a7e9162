from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomlink.core import ParameterError
from atomlink.domains.dipole_optics import (
    DipolePolarization,
    GaussianMode,
    LensSpec,
    cap_fraction,
    collection_fraction,
    fiber_coupled_efficiency,
    fiber_overlap,
    hemisphere_fraction,
    optimize_fiber_coupling,
)

SIGMA = DipolePolarization.SIGMA_PLUS
PI = DipolePolarization.PI


def _dense_sigma_overlap(na: float, waist_over_f: float, points: int = 200_000) -> float:
    """Midpoint-rule evaluation of the σ overlap on the lens plane (f = 1)."""

    x_max = na / math.sqrt(1.0 - na * na)
    h = x_max / points
    x = (np.arange(points) + 0.5) * h
    envelope = np.exp(-((x / waist_over_f) ** 2)) / (math.sqrt(math.pi) * waist_over_f)
    dipole = (1.0 + x * x) ** -0.75 * (1.0 / np.sqrt(1.0 + x * x) + 1.0)
    prefactor = 2.0 * math.pi * math.sqrt(3.0 / (16.0 * math.pi))
    amplitude = prefactor * np.sum(envelope * dipole * x) * h
    return amplitude**2 / cap_fraction(SIGMA, na)


@pytest.mark.parametrize("polarization", list(DipolePolarization))
def test_forward_hemisphere_holds_half_of_the_emission(polarization) -> None:
    collected = collection_fraction(polarization, LensSpec(numerical_aperture=1.0))
    assert collected == pytest.approx(0.5, abs=1e-6)
    assert hemisphere_fraction(polarization) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize(
    ("polarization", "na"),
    [(PI, 0.5), (SIGMA, 0.5), (SIGMA, 0.7), (DipolePolarization.SIGMA_MINUS, 0.9)],
)
def test_collection_matches_closed_form_cap_integral(polarization, na) -> None:
    numeric = collection_fraction(polarization, LensSpec(numerical_aperture=na))
    assert numeric == pytest.approx(cap_fraction(polarization, na), abs=1e-8)


def test_tiny_aperture_collects_almost_nothing() -> None:
    assert collection_fraction(SIGMA, LensSpec(numerical_aperture=1e-3)) < 1e-6


@settings(max_examples=20, deadline=None)
@given(
    na=st.floats(min_value=0.05, max_value=0.99),
    waist_ratio=st.floats(min_value=0.1, max_value=3.0),
)
def test_pi_light_never_couples_into_a_circular_mode(na, waist_ratio) -> None:
    lens = LensSpec(numerical_aperture=na)
    mode = GaussianMode(waist=waist_ratio * lens.rho_na)
    assert fiber_overlap(PI, lens, mode) == pytest.approx(0.0, abs=1e-8)


def test_sigma_overlap_agrees_with_dense_grid_oracle() -> None:
    lens = LensSpec(numerical_aperture=0.9)
    best = optimize_fiber_coupling(SIGMA, lens)
    numeric = fiber_overlap(SIGMA, lens, GaussianMode(best.waist))
    oracle = _dense_sigma_overlap(0.9, best.waist / lens.focal_length)
    assert numeric == pytest.approx(oracle, abs=1e-6)
    assert best.overlap == pytest.approx(numeric, abs=1e-6)


def test_small_aperture_overlap_reaches_top_hat_bound() -> None:
    betas = np.linspace(0.5, 2.0, 20001)
    bound = float(np.max(2.0 * (1.0 - np.exp(-(betas**2))) ** 2 / betas**2))

    best = optimize_fiber_coupling(SIGMA, LensSpec(numerical_aperture=0.05))

    assert bound == pytest.approx(0.8145, abs=1e-4)
    assert best.overlap == pytest.approx(bound, abs=5e-3)
    assert best.overlap <= 1.0


def test_fiber_coupling_stays_below_37_percent_at_full_aperture() -> None:
    near_limit = fiber_coupled_efficiency(SIGMA, 0.999)
    limit = fiber_coupled_efficiency(SIGMA, 1.0)
    assert 0.25 < near_limit < 0.37
    assert near_limit <= limit + 1e-9
    assert limit < 0.37


def test_pi_fiber_efficiency_vanishes() -> None:
    assert fiber_coupled_efficiency(PI, 0.8) == pytest.approx(0.0, abs=1e-8)


def test_results_do_not_depend_on_focal_length() -> None:
    short = fiber_coupled_efficiency(SIGMA, 0.6, focal_length=1e-3)
    long = fiber_coupled_efficiency(SIGMA, 0.6, focal_length=2e-3)
    assert long == pytest.approx(short, rel=1e-9)

    lens_a = LensSpec(0.6, focal_length=1e-3)
    lens_b = LensSpec(0.6, focal_length=2e-3)
    overlap_a = fiber_overlap(SIGMA, lens_a, GaussianMode(0.5 * lens_a.rho_na))
    overlap_b = fiber_overlap(SIGMA, lens_b, GaussianMode(0.5 * lens_b.rho_na))
    assert overlap_b == pytest.approx(overlap_a, rel=1e-9)


def test_fiber_efficiency_is_monotone_in_na() -> None:
    grid = np.linspace(0.02, 0.98, 50)
    values = [fiber_coupled_efficiency(SIGMA, float(na)) for na in grid]
    assert all(b >= a - 1e-8 for a, b in zip(values, values[1:]))


def test_coupled_fraction_never_exceeds_collected_fraction() -> None:
    for na in (0.2, 0.5, 0.8, 0.95):
        result = optimize_fiber_coupling(SIGMA, LensSpec(na))
        assert result.efficiency <= result.collection
        assert 0.0 <= result.overlap <= 1.0


def test_invalid_optics_inputs_are_rejected() -> None:
    with pytest.raises(ParameterError):
        LensSpec(numerical_aperture=0.0)
    with pytest.raises(ParameterError):
        LensSpec(numerical_aperture=1.2)
    with pytest.raises(ParameterError):
        LensSpec(numerical_aperture=0.5, focal_length=-1.0)
    with pytest.raises(ParameterError):
        GaussianMode(waist=0.0)
    with pytest.raises(ParameterError):
        cap_fraction(SIGMA, 1.5)


def test_polarization_handedness() -> None:
    assert SIGMA.handedness == 1
    assert DipolePolarization.SIGMA_MINUS.handedness == -1
    assert PI.handedness == 0
    assert DipolePolarization("pi") is PI

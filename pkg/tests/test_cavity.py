from __future__ import annotations

import math

import pytest

from atomlink.core import ParameterError
from atomlink.core.constants import MHZ, MM, SPEED_OF_LIGHT, UM, cyclic
from atomlink.domains.cavity import (
    RB87_D2,
    CavityGeometry,
    MirrorSet,
    confocal_waist,
    cqed_params,
    finesse,
    kappa,
    mode_volume_ratio,
    modes_resolved,
    near_concentric_waist,
    transverse_mode_spacing,
)

LONG = CavityGeometry(length=9.99 * MM, mirror_roc=5.0 * MM)
MEDIUM = CavityGeometry(length=3.99 * MM, mirror_roc=2.0 * MM)
SHORT = CavityGeometry(length=0.15 * MM, mirror_roc=0.15 * MM)


def _mirrors(t_high_ppm: float) -> MirrorSet:
    return MirrorSet(t_high=t_high_ppm * 1e-6, t_low=10e-6, loss_rt=40e-6)


@pytest.mark.parametrize(
    ("geometry", "expected_um"),
    [(LONG, 6.264), (MEDIUM, 4.980), (SHORT, 4.315)],
)
def test_mode_waists_of_reference_designs(geometry, expected_um) -> None:
    assert near_concentric_waist(geometry, RB87_D2) / UM == pytest.approx(expected_um, abs=2e-3)


def test_confocal_geometry_reduces_to_confocal_waist() -> None:
    assert near_concentric_waist(SHORT, RB87_D2) == pytest.approx(
        confocal_waist(SHORT.length, RB87_D2), rel=1e-12
    )


def test_long_cavity_parameters() -> None:
    params = cqed_params(LONG, _mirrors(5730.0), RB87_D2)

    assert params.finesse == pytest.approx(1083.9, rel=2e-3)
    assert cyclic(params.kappa_fwhm) / MHZ == pytest.approx(13.84, rel=3e-3)
    assert cyclic(params.g) / MHZ == pytest.approx(8.26, rel=3e-3)
    assert params.cooperativity == pytest.approx(1.626, rel=3e-3)
    assert params.purcell_factor == pytest.approx(1.0 + 2.0 * params.cooperativity)


@pytest.mark.parametrize("geometry", [LONG, MEDIUM, SHORT])
def test_cooperativity_matches_geometric_expression(geometry) -> None:
    params = cqed_params(geometry, _mirrors(3000.0), RB87_D2)
    geometric = 3.0 * params.finesse * RB87_D2.wavelength**2 / (math.pi**3 * params.waist**2)
    assert params.cooperativity == pytest.approx(geometric, rel=1e-9)


def test_finesse_of_lossy_mirrors_approaches_two_pi_over_loss() -> None:
    mirrors = MirrorSet(t_high=20e-6, t_low=10e-6, loss_rt=20e-6)
    assert finesse(mirrors) == pytest.approx(2.0 * math.pi / mirrors.total_loss, rel=1e-4)


def test_lossless_mirrors_are_rejected() -> None:
    with pytest.raises(ParameterError):
        finesse(MirrorSet(t_high=0.0, t_low=0.0, loss_rt=0.0))


def test_kappa_rejects_non_positive_inputs() -> None:
    with pytest.raises(ParameterError):
        kappa(0.0, 100.0)
    with pytest.raises(ParameterError):
        kappa(1e-3, 0.0)


def test_mirror_set_validation() -> None:
    with pytest.raises(ParameterError):
        MirrorSet(t_high=-1e-6, t_low=10e-6, loss_rt=40e-6)
    with pytest.raises(ParameterError):
        MirrorSet(t_high=0.6, t_low=0.3, loss_rt=0.2)
    mirrors = _mirrors(1000.0)
    assert mirrors.outcoupling_fraction == pytest.approx(1000.0 / 1050.0)
    assert mirrors.with_t_high(2e-3).t_high == 2e-3


def test_unstable_resonators_are_rejected() -> None:
    with pytest.raises(ParameterError):
        CavityGeometry(length=10.1 * MM, mirror_roc=5.0 * MM)
    with pytest.raises(ParameterError):
        CavityGeometry(length=-1.0, mirror_roc=5.0 * MM)


def test_concentric_point_has_no_waist() -> None:
    concentric = CavityGeometry(length=10.0 * MM, mirror_roc=5.0 * MM)
    assert concentric.stability == pytest.approx(-1.0)
    with pytest.raises(ParameterError):
        near_concentric_waist(concentric, RB87_D2)


def test_critical_distance_round_trip() -> None:
    geometry = CavityGeometry.from_critical_distance(5.0 * MM, 10.0 * UM)
    assert geometry.length == pytest.approx(9.99 * MM)
    assert geometry.d_crit == pytest.approx(10.0 * UM)


@pytest.mark.parametrize(
    ("mirror_roc_mm", "expected_mhz"),
    [(5.0, 95.4), (2.0, 377.3)],
)
def test_transverse_mode_spacing_near_concentric(mirror_roc_mm, expected_mhz) -> None:
    geometry = CavityGeometry.from_critical_distance(mirror_roc_mm * MM, 1.0 * UM)
    assert transverse_mode_spacing(geometry) / MHZ == pytest.approx(expected_mhz, rel=2e-3)


def test_modes_stay_resolved_for_reference_design() -> None:
    params = cqed_params(LONG, _mirrors(5730.0), RB87_D2)
    assert modes_resolved(LONG, params) > 10.0


def test_mode_volume_ratio() -> None:
    confocal = CavityGeometry(length=5.0 * MM, mirror_roc=5.0 * MM)
    assert mode_volume_ratio(LONG, LONG, RB87_D2) == pytest.approx(1.0)
    assert mode_volume_ratio(confocal, LONG, RB87_D2) > 1.0


def test_dipole_element_reproduces_linewidth() -> None:
    # two-level element: 3.58e-29 C m over sqrt(2)
    assert RB87_D2.dipole_element == pytest.approx(2.534e-29, rel=5e-3)


@pytest.mark.parametrize(
    ("geometry", "t_high_ppm", "finesse_value", "kappa_mhz", "g_mhz", "cooperativity"),
    [
        (MEDIUM, 4620.0, 1342.4, 27.99, 16.45, 3.187),
        (SHORT, 1540.0, 3948.7, 253.07, 97.92, 12.48),
    ],
)
def test_medium_and_short_cavity_parameters(
    geometry, t_high_ppm, finesse_value, kappa_mhz, g_mhz, cooperativity
) -> None:
    params = cqed_params(geometry, _mirrors(t_high_ppm), RB87_D2)

    assert params.finesse == pytest.approx(finesse_value, rel=2e-3)
    assert cyclic(params.kappa_fwhm) / MHZ == pytest.approx(kappa_mhz, rel=3e-3)
    assert cyclic(params.g) / MHZ == pytest.approx(g_mhz, rel=5e-3)
    assert params.cooperativity == pytest.approx(cooperativity, rel=5e-3)


def test_finesse_is_symmetric_in_the_two_transmissions() -> None:
    forward = MirrorSet(t_high=4620e-6, t_low=10e-6, loss_rt=40e-6)
    swapped = MirrorSet(t_high=10e-6, t_low=4620e-6, loss_rt=40e-6)
    assert finesse(forward) == pytest.approx(finesse(swapped), rel=1e-15)


@pytest.mark.parametrize("length_mm", [0.15, 3.99, 9.99])
@pytest.mark.parametrize("finesse_value", [100.0, 1083.9, 3.0e5])
def test_kappa_times_length_and_finesse_is_pi_c(length_mm, finesse_value) -> None:
    length = length_mm * MM
    product = kappa(length, finesse_value) * length * finesse_value
    assert product == pytest.approx(math.pi * SPEED_OF_LIGHT, rel=1e-12)


def test_cooperativity_per_finesse_scales_with_inverse_mode_area() -> None:
    rng = np.random.default_rng(2024)
    expected = 3.0 * RB87_D2.wavelength**2 / math.pi**3
    for _ in range(20):
        mirror_roc = rng.uniform(0.5, 10.0) * MM
        d_crit = rng.uniform(1e-3, 1.0) * mirror_roc
        geometry = CavityGeometry.from_critical_distance(mirror_roc, d_crit)
        mirrors = MirrorSet(t_high=rng.uniform(1e-4, 1e-2), t_low=10e-6, loss_rt=40e-6)
        params = cqed_params(geometry, mirrors, RB87_D2)
        ratio = params.cooperativity * params.waist**2 / params.finesse
        assert ratio == pytest.approx(expected, rel=1e-9)


def test_transverse_mode_spacing_closes_at_the_concentric_point() -> None:
    spacings = [
        transverse_mode_spacing(CavityGeometry.from_critical_distance(5.0 * MM, d))
        for d in (100.0 * UM, 10.0 * UM, 1.0 * UM, 0.01 * UM)
    ]
    assert spacings == sorted(spacings, reverse=True)
    assert spacings[-1] / MHZ < 10.0

    concentric = CavityGeometry(length=10.0 * MM, mirror_roc=5.0 * MM)
    assert transverse_mode_spacing(concentric) == pytest.approx(0.0, abs=1e-6)


def test_waist_grows_with_distance_from_the_concentric_point() -> None:
    waists = [
        near_concentric_waist(CavityGeometry.from_critical_distance(5.0 * MM, d), RB87_D2)
        for d in np.geomspace(1.0 * UM, 5.0 * MM, 30)
    ]
    assert all(a < b for a, b in zip(waists, waists[1:]))

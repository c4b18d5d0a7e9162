from __future__ import annotations

import json
from pathlib import Path

import pytest

from atomlink.config import (
    default_config_text,
    load_config,
    load_default_config,
    parse_config,
)
from atomlink.core import ConfigError
from atomlink.domains.entangle import ProtocolTimings
from atomlink.domains.fidelity import compose_budget, default_budget_entries


def _minimal(**extra: object) -> dict[str, object]:
    payload: dict[str, object] = {
        "designs": [{"name": "long", "length_mm": 9.99, "mirror_roc_mm": 5.0}]
    }
    payload.update(extra)
    return payload


def _error_path(payload: object) -> str:
    with pytest.raises(ConfigError) as info:
        parse_config(payload)
    return info.value.key_path


def test_default_config_describes_reference_designs() -> None:
    config = load_default_config()

    assert [d.name for d in config.designs] == [
        "short_confocal",
        "medium_near_concentric",
        "long_near_concentric",
    ]
    assert config.simulation.seed == 42
    assert config.simulation.p_aa == 0.056
    assert config.detection.fiber_length_km == 0.01
    assert [d.name for d in config.lens_designs()] == ["NA 0.3", "NA 0.5", "NA 0.7", "NA 0.9"]


def test_shipped_document_matches_dataclass_defaults() -> None:
    shipped = json.loads(default_config_text())
    minimal = parse_config({"designs": shipped["designs"]})
    assert minimal == load_default_config()


def test_config_round_trips_through_json() -> None:
    config = load_default_config()
    assert parse_config(json.loads(json.dumps(config.to_dict()))) == config


def test_designs_build_si_domain_objects() -> None:
    design = parse_config(_minimal()).cavity_designs()[0]
    assert design.length == pytest.approx(9.99e-3)
    assert design.mirror_roc == pytest.approx(5e-3)
    assert design.t_low == pytest.approx(10e-6)
    assert design.t_high is None


def test_timings_and_budget_sections_build() -> None:
    config = parse_config(_minimal())
    timings = config.timings.build()
    assert timings.block_duration == pytest.approx(ProtocolTimings().block_duration)
    budget = compose_budget(entry.build() for entry in config.fidelity.entries)
    assert budget.total == pytest.approx(0.142)


def test_missing_designs_section() -> None:
    assert _error_path({"atom": {}}) == "designs"
    assert _error_path({"designs": []}) == "designs"


def test_unknown_keys_are_reported_with_their_path() -> None:
    assert _error_path(_minimal(timings={"t_pump": 6.0})) == "timings.t_pump"
    assert _error_path(_minimal(extra=1)) == "extra"
    assert _error_path(_minimal(sweeps={"na": {"step": 3}})) == "sweeps.na.step"


def test_type_errors_are_reported_with_their_path() -> None:
    assert _error_path(_minimal(simulation={"seed": "seven"})) == "simulation.seed"
    assert _error_path(_minimal(simulation={"trials": 1.5})) == "simulation.trials"
    assert _error_path(_minimal(timings={"cool_after_success": 1})) == "timings.cool_after_success"


def test_domain_invariants_are_checked_at_load_time() -> None:
    unstable = {"designs": [{"name": "x", "length_mm": 11.0, "mirror_roc_mm": 5.0}]}
    assert _error_path(unstable) == "designs[0]"
    assert _error_path(_minimal(lens_na=[0.5, 1.5])) == "lens_na[1]"
    assert _error_path(_minimal(detection={"detector_qe": 0.0})) == "detection"
    assert _error_path(_minimal(simulation={"convention": "fast"})) == "simulation.convention"
    assert _error_path(_minimal(simulation={"p_aa": 0.0})) == "simulation.p_aa"
    assert _error_path(_minimal(sweeps={"d_crit": {"lo_um": 0.0}})) == "sweeps.d_crit.lo_um"


def test_duplicate_design_names_are_rejected() -> None:
    design = {"name": "long", "length_mm": 9.99, "mirror_roc_mm": 5.0}
    assert _error_path({"designs": [design, design]}) == "designs"


def test_p_aa_may_be_left_unset() -> None:
    config = parse_config(_minimal(simulation={"p_aa": None}))
    assert config.simulation.p_aa is None


def test_overrides_replace_simulation_settings() -> None:
    config = load_default_config().with_overrides(seed=7, trials=10, p_aa=0.2, output_dir="out")
    assert config.simulation.seed == 7
    assert config.simulation.trials == 10
    assert config.simulation.p_aa == 0.2
    assert config.output_dir == "out"
    assert load_default_config().with_overrides() == load_default_config()

    with pytest.raises(ConfigError) as info:
        load_default_config().with_overrides(seed=-1)
    assert info.value.key_path == "simulation.seed"


def test_load_config_reports_file_problems(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.json")

    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="decode"):
        load_config(broken)

    good = tmp_path / "good.json"
    good.write_text(json.dumps(_minimal(output_dir="elsewhere")), encoding="utf-8")
    assert load_config(good).output_dir == "elsewhere"


def test_default_budget_section_mirrors_domain_defaults() -> None:
    built = tuple(entry.build() for entry in load_default_config().fidelity.entries)
    assert [e.name for e in built] == [e.name for e in default_budget_entries()]
    for mine, reference in zip(built, default_budget_entries()):
        assert mine.infidelity == pytest.approx(reference.infidelity, rel=1e-12)
        assert mine.verification_only == reference.verification_only

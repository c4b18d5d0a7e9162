"""Regression tests for the ``atomlink.cli`` module."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import pytest
from pytest import CaptureFixture

from atomlink.cli import build_parser, main
from atomlink.reports import TABLE2_COLUMNS


def _read_version() -> str:
    from atomlink import __version__

    return __version__


def _csv_rows(text: str) -> list[list[str]]:
    return list(csv.reader(io.StringIO(text)))


def _quantities(text: str) -> dict[str, str]:
    return {row[0]: row[1] for row in _csv_rows(text)[1:]}


def test_table2_text_output(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    exit_code = main(["table2", "--out", str(tmp_path)])
    captured = capsys.readouterr()

    assert exit_code == 0
    assert "long_near_concentric" in captured.out
    assert "short_confocal" in captured.out
    saved = _csv_rows((tmp_path / "table2.csv").read_text(encoding="utf-8"))
    assert tuple(saved[0]) == TABLE2_COLUMNS
    assert len(saved) == 4


def test_table2_csv_output_matches_saved_file(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    exit_code = main(["table2", "--format", "csv", "--out", str(tmp_path)])
    captured = capsys.readouterr()

    assert exit_code == 0
    assert captured.out == (tmp_path / "table2.csv").read_text(encoding="utf-8")
    rows = {row[0]: dict(zip(TABLE2_COLUMNS, row)) for row in _csv_rows(captured.out)[1:]}
    assert float(rows["long_near_concentric"]["eta_rb"]) == pytest.approx(0.4716, abs=2e-3)
    assert float(rows["long_near_concentric"]["w0_um"]) == pytest.approx(6.264, abs=2e-3)


def test_budget_command(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    exit_code = main(["budget", "--format", "csv", "--out", str(tmp_path)])
    captured = capsys.readouterr()

    assert exit_code == 0
    values = _quantities(captured.out)
    assert float(values["total"]) == pytest.approx(14.2)
    assert float(values["fidelity_additive"]) == pytest.approx(85.8)
    assert float(values["intrinsic_total"]) == pytest.approx(6.2)
    assert float(values["model_dephasing"]) == pytest.approx(0.03999, rel=1e-3)
    assert "model_temporal_overlap_long_near_concentric" in values


def test_simulate_is_reproducible(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    argv = ["simulate", "--trials", "3000", "--seed", "9", "--format", "csv"]
    argv += ["--out", str(tmp_path)]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out

    assert first == second
    values = _quantities(first)
    assert values["trials"] == "3000"
    assert values["seed"] == "9"
    assert float(values["p_aa"]) == 0.056
    assert (tmp_path / "simulate.csv").is_file()


def test_simulate_with_certain_success(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    exit_code = main(
        ["simulate", "--p-aa", "1", "--no-loss", "--trials", "10", "--format", "csv"]
        + ["--out", str(tmp_path)]
    )
    values = _quantities(capsys.readouterr().out)

    assert exit_code == 0
    assert float(values["mean_time_s"]) == pytest.approx(7.03e-6, rel=1e-9)
    assert values["reload_events"] == "0"
    assert values["include_loss"] == "false"


def test_simulate_with_vanishing_success_probability(
    capsys: CaptureFixture[str], tmp_path: Path
) -> None:
    argv = ["simulate", "--p-aa", "1e-17", "--no-loss", "--trials", "1", "--format", "csv"]
    exit_code = main([*argv, "--out", str(tmp_path)])
    values = _quantities(capsys.readouterr().out)

    assert exit_code == 0
    exact = float(values["analytic_exact_time_s"])
    assert exact == pytest.approx(float(values["analytic_epoch_time_s"]), rel=1e-9)


def test_optimize_command(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    exit_code = main(
        ["optimize", "--objective", "two_level", "--format", "csv", "--out", str(tmp_path)]
    )
    rows = _csv_rows(capsys.readouterr().out)

    assert exit_code == 0
    assert rows[0] == [
        "design",
        "objective",
        "t_high_ppm",
        "eta_opt",
        "evaluations",
        "grid_fallback",
    ]
    assert {row[1] for row in rows[1:]} == {"two_level"}


def test_figure_command_with_custom_config(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps(
            {
                "designs": [{"name": "long", "length_mm": 9.99, "mirror_roc_mm": 5.0}],
                "sweeps": {"na": {"lo": 0.2, "hi": 0.8, "points": 3}},
            }
        ),
        encoding="utf-8",
    )
    argv = ["figure", "fig2", "--config", str(config), "--format", "csv"]
    exit_code = main([*argv, "--out", str(tmp_path)])
    rows = _csv_rows(capsys.readouterr().out)

    assert exit_code == 0
    assert rows[0] == ["na", "free_space", "fiber_coupled", "mode_overlap"]
    assert len(rows) == 4
    assert (tmp_path / "fig2.csv").is_file()


def test_unknown_figure_returns_error(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    exit_code = main(["figure", "fig9", "--out", str(tmp_path)])
    captured = capsys.readouterr()

    assert exit_code == 1
    assert "unknown figure: fig9" in captured.err
    assert captured.out == ""


def test_invalid_config_returns_error(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"designs": [], "simulation": {}}), encoding="utf-8")
    exit_code = main(["table2", "--config", str(config), "--out", str(tmp_path)])
    captured = capsys.readouterr()

    assert exit_code == 1
    assert captured.err.startswith("error: designs")


def test_invalid_override_returns_error(capsys: CaptureFixture[str], tmp_path: Path) -> None:
    exit_code = main(["simulate", "--seed", "-3", "--out", str(tmp_path)])
    captured = capsys.readouterr()

    assert exit_code == 1
    assert "simulation.seed" in captured.err


def test_version_command(capsys: CaptureFixture[str]) -> None:
    exit_code = main(["version"])
    captured = capsys.readouterr()
    assert exit_code == 0
    assert captured.out.strip() == _read_version()


def test_no_command_prints_help(capsys: CaptureFixture[str]) -> None:
    assert main([]) == 0
    assert "usage" in capsys.readouterr().out


def test_parser_knows_every_command() -> None:
    parser = build_parser()
    for command in ("table2", "simulate", "optimize", "budget", "version"):
        args = parser.parse_args([command])
        assert callable(args.handler)
    with pytest.raises(SystemExit):
        parser.parse_args(["figure", "fig2", "--format", "json"])

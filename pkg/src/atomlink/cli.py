"""Command line front end.

Every command prints an aligned text table (or CSV with ``--format csv``) on
stdout and writes the same table as CSV into the output directory.  Progress
and diagnostics go to stderr through :mod:`logging`.

Example usage::

    $ atomlink table2
    $ atomlink figure fig6 --out results
    $ atomlink simulate --seed 7 --trials 1000000 --workers 4
    $ atomlink budget --format csv

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Callable, Optional

from . import __version__ as _package_version
from . import reports
from .config import RunConfig, load_config, load_default_config
from .core.errors import NumericalError, ParameterError
from .core.observer import LoggingObserver
from .domains.entangle import simulate
from .domains.mirror_opt import EfficiencyObjective
from .figures import FIGURES, build_figure
from .tables import Table

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"

Handler = Callable[[argparse.Namespace, RunConfig], int]


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _load(args: argparse.Namespace) -> RunConfig:
    config = load_config(Path(args.config)) if args.config else load_default_config()
    return config.with_overrides(
        seed=getattr(args, "seed", None),
        trials=getattr(args, "trials", None),
        workers=getattr(args, "workers", None),
        p_aa=getattr(args, "p_aa", None),
        output_dir=args.out,
    )


def _emit(table: Table, name: str, args: argparse.Namespace, config: RunConfig) -> None:
    if args.format == "csv":
        sys.stdout.write(table.to_csv())
    else:
        sys.stdout.write(table.format_text() + "\n")
    path = table.save_csv(Path(config.output_dir) / f"{name}.csv")
    logger.info("wrote %s", path)


def _handle_table2(args: argparse.Namespace, config: RunConfig) -> int:
    _emit(reports.table2(config), "table2", args, config)
    return 0


def _handle_figure(args: argparse.Namespace, config: RunConfig) -> int:
    if args.name not in FIGURES:
        sys.stderr.write(f"unknown figure: {args.name} (choose from {', '.join(FIGURES)})\n")
        return 1
    table = build_figure(
        args.name, config, workers=config.simulation.workers, observer=LoggingObserver()
    )
    _emit(table, args.name, args, config)
    return 0


def _handle_simulate(args: argparse.Namespace, config: RunConfig) -> int:
    if args.no_loss:
        config = dataclasses.replace(
            config, simulation=dataclasses.replace(config.simulation, include_loss=False)
        )
    p_aa = reports.resolve_p_aa(config)
    sim = config.simulation
    result = simulate(
        p_aa,
        config.timings.build(),
        trials=sim.trials,
        seed=sim.seed,
        include_loss=sim.include_loss,
        workers=sim.workers,
        observer=LoggingObserver(),
    )
    _emit(reports.simulation(config, p_aa, result), "simulate", args, config)
    return 0


def _handle_optimize(args: argparse.Namespace, config: RunConfig) -> int:
    _emit(reports.optimize(config, EfficiencyObjective(args.objective)), "optimize", args, config)
    return 0


def _handle_budget(args: argparse.Namespace, config: RunConfig) -> int:
    budget, table = reports.budget(config)
    if budget.clamped:
        logger.warning("infidelity total clamped at 1")
    _emit(table, "budget", args, config)
    return 0


def _handle_version(_: argparse.Namespace) -> int:
    sys.stdout.write(f"{_package_version}\n")
    return 0


def _run(handler: Handler) -> Callable[[argparse.Namespace], int]:
    def runner(args: argparse.Namespace) -> int:
        try:
            config = _load(args)
            return handler(args, config)
        except ParameterError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 1
        except NumericalError as exc:
            sys.stderr.write(f"numerical failure: {exc}\n")
            return 2

    return runner


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", help="Path to a JSON run configuration (default: shipped config)."
    )
    common.add_argument("--out", help="Directory for CSV output (default: config output_dir).")
    common.add_argument(
        "--format",
        choices=("text", "csv"),
        default="text",
        help="Format of the table printed on stdout.",
    )
    common.add_argument(
        "--workers", type=int, help="Worker count for sweeps and simulations."
    )
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="Increase log verbosity (-v, -vv)."
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    """Return the top-level CLI argument parser."""

    common = _common_options()
    parser = argparse.ArgumentParser(
        description="Photon collection and entanglement-rate models for neutral-atom network links."
    )
    subparsers = parser.add_subparsers(dest="command")

    table2_parser = subparsers.add_parser(
        "table2", parents=[common], help="Summarise the configured cavity designs."
    )
    table2_parser.set_defaults(handler=_run(_handle_table2))

    figure_parser = subparsers.add_parser(
        "figure", parents=[common], help="Emit the dataset behind a figure."
    )
    figure_parser.add_argument("name", help=f"Figure name ({', '.join(FIGURES)}).")
    figure_parser.set_defaults(handler=_run(_handle_figure))

    simulate_parser = subparsers.add_parser(
        "simulate", parents=[common], help="Monte Carlo of the entanglement generation sequence."
    )
    simulate_parser.add_argument("--seed", type=int, help="Random seed (non-negative).")
    simulate_parser.add_argument("--trials", type=int, help="Number of simulated pairs.")
    simulate_parser.add_argument(
        "--p-aa", dest="p_aa", type=float, help="Override the per-attempt success probability."
    )
    simulate_parser.add_argument(
        "--no-loss", action="store_true", help="Disable atom loss and trap reloads."
    )
    simulate_parser.set_defaults(handler=_run(_handle_simulate))

    optimize_parser = subparsers.add_parser(
        "optimize", parents=[common], help="Optimise T_high for every configured design."
    )
    optimize_parser.add_argument(
        "--objective",
        choices=[o.value for o in EfficiencyObjective],
        default=EfficiencyObjective.RB.value,
        help="Efficiency to maximise.",
    )
    optimize_parser.set_defaults(handler=_run(_handle_optimize))

    budget_parser = subparsers.add_parser(
        "budget", parents=[common], help="Compose the entanglement infidelity budget."
    )
    budget_parser.set_defaults(handler=_run(_handle_budget))

    version_parser = subparsers.add_parser(
        "version", help="Show the installed atomlink package version."
    )
    version_parser.set_defaults(handler=_handle_version)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point used by the ``atomlink`` console script."""

    parser = build_parser()
    args = parser.parse_args(argv)
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help()
        return 0
    _configure_logging(getattr(args, "verbose", 0))
    return handler(args)


__all__ = ["build_parser", "main"]

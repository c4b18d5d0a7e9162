"""Observer primitives for sweeps and Monte Carlo runs.

Long-running operations (parameter sweeps, chunked simulations) report
progress through a tiny callback protocol instead of printing.  Callers plug
in whatever they need: a progress bar, a collector for tests, or the
:class:`LoggingObserver` bridge used by the command line.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Protocol

Payload = Mapping[str, object]


class ProgressEvent(Enum):
    """Events emitted by sweeps and simulations."""

    POINT_EVALUATED = auto()
    POINT_INVALID = auto()
    SWEEP_COMPLETE = auto()
    CHUNK_SIMULATED = auto()
    SIMULATION_COMPLETE = auto()


class Observer(Protocol):
    """Structural type for observer callbacks."""

    def __call__(self, event: ProgressEvent, payload: Payload, /, **metadata: object) -> None:
        ...


@dataclass(frozen=True)
class NoopObserver:
    """Default observer that records nothing."""

    def __call__(
        self, event: ProgressEvent, payload: Payload, /, **metadata: object
    ) -> None:
        return None


@dataclass(frozen=True)
class LoggingObserver:
    """Forward events to a :mod:`logging` logger.

    Invalid sweep points are logged as warnings, everything else at ``level``.
    """

    logger: logging.Logger = field(default_factory=lambda: logging.getLogger("atomlink.progress"))
    level: int = logging.DEBUG

    def __call__(self, event: ProgressEvent, payload: Payload, /, **metadata: object) -> None:
        level = logging.WARNING if event is ProgressEvent.POINT_INVALID else self.level
        details = ", ".join(f"{key}={value}" for key, value in {**payload, **metadata}.items())
        self.logger.log(level, "%s %s", event.name.lower(), details)


def combine_observers(*observers: Observer) -> Observer:
    """Return an observer that forwards events to each provided observer."""

    def _combined(event: ProgressEvent, payload: Payload, /, **metadata: object) -> None:
        for observer in observers:
            observer(event, payload, **metadata)

    return _combined


__all__ = [
    "LoggingObserver",
    "NoopObserver",
    "Observer",
    "Payload",
    "ProgressEvent",
    "combine_observers",
]

from __future__ import annotations

import logging

from atomlink.core import LoggingObserver, NoopObserver, ProgressEvent, combine_observers


def test_noop_observer_accepts_any_event() -> None:
    assert NoopObserver()(ProgressEvent.SWEEP_COMPLETE, {"points": 3}) is None


def test_combined_observer_forwards_to_each_member() -> None:
    seen_a: list[tuple[ProgressEvent, dict]] = []
    seen_b: list[ProgressEvent] = []

    def first(event, payload, /, **metadata):
        seen_a.append((event, {**payload, **metadata}))

    def second(event, payload, /, **metadata):
        seen_b.append(event)

    observer = combine_observers(first, second)
    observer(ProgressEvent.CHUNK_SIMULATED, {"chunk": 0}, chunks=2)

    assert seen_a == [(ProgressEvent.CHUNK_SIMULATED, {"chunk": 0, "chunks": 2})]
    assert seen_b == [ProgressEvent.CHUNK_SIMULATED]


def test_logging_observer_warns_on_invalid_points(caplog) -> None:
    observer = LoggingObserver(logger=logging.getLogger("atomlink.test"), level=logging.INFO)
    with caplog.at_level(logging.INFO, logger="atomlink.test"):
        observer(ProgressEvent.POINT_EVALUATED, {"index": 0})
        observer(ProgressEvent.POINT_INVALID, {"index": 1})

    levels = [record.levelno for record in caplog.records]
    assert levels == [logging.INFO, logging.WARNING]
    assert "point_invalid" in caplog.records[1].getMessage()
    assert "index=1" in caplog.records[1].getMessage()

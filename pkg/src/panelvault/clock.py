"""Injectable clock.

All date and timestamp decisions (version dates, listing headers, session
expiry) go through a Clock instance so tests and fixture reproductions can
pin time exactly.
"""

from __future__ import annotations

import datetime as dt


class Clock:
    """Wall clock. Subclass or replace for deterministic time."""

    def now(self) -> dt.datetime:
        return dt.datetime.now().replace(microsecond=0)

    def today(self) -> dt.date:
        return self.now().date()


class FixedClock(Clock):
    """Clock pinned to one instant; advance it explicitly with set()."""

    def __init__(self, instant: dt.datetime):
        self._instant = instant

    def now(self) -> dt.datetime:
        return self._instant

    def set(self, instant: dt.datetime) -> None:
        self._instant = instant

    def set_date(self, day: dt.date) -> None:
        self._instant = dt.datetime.combine(day, dt.time())


def parse_clock(spec: str) -> FixedClock:
    """Build a FixedClock from an ISO date or datetime string."""
    try:
        instant = dt.datetime.fromisoformat(spec)
    except ValueError as exc:
        raise ValueError(f"not an ISO date/datetime: {spec!r}") from exc
    return FixedClock(instant)

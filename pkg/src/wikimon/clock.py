"""Time sources.

All timing-dependent behavior (criteria evaluation, eviction, event
timestamps) goes through a Clock so that replay runs are deterministic:
a VirtualClock is advanced from replay-record offsets and never consults
wall time.
"""

from __future__ import annotations

import time
from datetime import datetime, timezone

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def to_utc(ts: float) -> datetime:
    return datetime.fromtimestamp(ts, tz=timezone.utc)


def isoformat_ms(ts: float) -> str:
    """Render a unix timestamp as UTC ISO-8601 with millisecond precision."""
    dt = to_utc(ts)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}Z"


class WallClock:
    def now(self) -> float:
        return time.time()


class VirtualClock:
    """Clock driven explicitly by the replay loop.

    `now()` never moves on its own; callers advance it from record offsets.
    """

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance_to(self, ts: float) -> None:
        # Never move backwards; replay offsets are validated sorted upstream.
        if ts > self._now:
            self._now = ts

"""Recent-changes acquisition and parsing.

Lines arrive either from the live IRC feed (one chat room per language
edition) or from a replay file, and are parsed into RecentChange values.
The wire format carries no timestamp: live lines are stamped with arrival
time, replayed lines with the virtual clock.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Union
from urllib.parse import parse_qs, urlsplit

from .clock import VirtualClock

CHANNEL_RE = re.compile(r"^#([^.\s]+)\.wikipedia$")
LANG_RE = re.compile(r"^[^.\s]+$")
DELTA_COMMENT_RE = re.compile(r"^\(([+-]\d+)\)\s?(.*)$", re.S)

# mIRC formatting bytes: bold, color (with optional fg[,bg] digits),
# reset, reverse, italics, underline.
MIRC_CODES_RE = re.compile("\x03\\d{1,2}(?:,\\d{1,2})?|[\x02\x03\x0f\x16\x1d\x1f]")

# Meta namespaces whose pages are dropped before monitoring; encyclopedia
# articles are the clustering unit, meta pages just create spurious spikes.
META_NAMESPACE_PREFIXES = (
    "Special:",
    "Talk:",
    "User:",
    "User talk:",
    "Wikipedia:",
    "File:",
    "Template:",
    "Category talk:",
)


class ParseError(ValueError):
    """A recent-changes line that does not match the wire grammar."""

    def __init__(self, message: str, payload: str):
        super().__init__(f"{message}: {payload!r}")
        self.payload = payload


class ReplayFormatError(ValueError):
    """A replay file violating the record format or offset ordering."""


class InvalidLanguageError(ValueError):
    pass


@dataclass(frozen=True)
class RawLine:
    channel: str
    payload: str
    received_at: float  # unix seconds, millisecond precision


@dataclass(frozen=True)
class RecentChange:
    language: str
    title: str
    diff_rev: Optional[int]
    old_rev: Optional[int]
    url: str
    editor: str
    delta: int
    comment: str
    timestamp: float


@dataclass(frozen=True)
class ReplayRecord:
    offset_ms: int
    channel: str
    payload: str


@dataclass
class ReplaySummary:
    delivered: int = 0
    skipped: int = 0


def channel_for_language(lang: str) -> str:
    """IRC room for a language edition; "wikidata" maps like any other."""
    if not lang or not lang.strip() or not LANG_RE.match(lang):
        raise InvalidLanguageError(f"invalid language token: {lang!r}")
    return "#" + lang + ".wikipedia"


def strip_mirc_codes(text: str) -> str:
    return MIRC_CODES_RE.sub("", text)


def canonical_title(title: str) -> str:
    return title.replace("_", " ").strip()


def is_meta_title(title: str) -> bool:
    return title.startswith(META_NAMESPACE_PREFIXES)


def _revisions_from_url(url: str) -> tuple[Optional[int], Optional[int]]:
    try:
        query = parse_qs(urlsplit(url).query)
        diff = query.get("diff", [None])[0]
        oldid = query.get("oldid", [None])[0]
        if diff is not None and oldid is not None:
            return int(diff), int(oldid)
    except (ValueError, TypeError):
        pass
    return None, None


def parse_rc_line(line: RawLine) -> RecentChange:
    """Parse one chat-room message into a RecentChange.

    Grammar: ``[[title]] url * editor * (delta) comment`` with fields
    separated by '*'. Formatting control bytes are stripped first; the
    live feed colors its messages even though the documented grammar
    does not mention it.
    """
    m = CHANNEL_RE.match(line.channel)
    if not m:
        raise ParseError("invalid channel", line.channel)
    language = m.group(1)

    payload = strip_mirc_codes(line.payload)

    start = payload.find("[[")
    end = payload.find("]]", start + 2)
    if start == -1 or end == -1:
        raise ParseError("missing [[title]] span", line.payload)
    title = canonical_title(payload[start + 2 : end])
    if not title:
        raise ParseError("empty title", line.payload)

    rest = payload[end + 2 :]
    fields = rest.split("*", 2)
    if len(fields) < 3:
        raise ParseError("fewer than 3 asterisk-separated fields", line.payload)

    # The slot before the first '*' may carry flag tokens before the URL.
    url = next(
        (tok for tok in fields[0].split() if tok.startswith(("http://", "https://"))),
        "",
    )
    diff_rev, old_rev = _revisions_from_url(url)

    editor = fields[1].strip()

    dm = DELTA_COMMENT_RE.match(fields[2].strip())
    if not dm:
        raise ParseError("unparseable delta token", line.payload)
    delta = int(dm.group(1))
    comment = dm.group(2)

    return RecentChange(
        language=language,
        title=title,
        diff_rev=diff_rev,
        old_rev=old_rev,
        url=url,
        editor=editor,
        delta=delta,
        comment=comment,
        timestamp=line.received_at,
    )


def render_rc_line(rc: RecentChange) -> str:
    """Render a RecentChange back to the wire grammar (canonical form)."""
    return f"[[{rc.title}]] {rc.url} * {rc.editor} * ({rc.delta:+d}) {rc.comment}"


def _iter_replay_lines(path: Union[str, Path]):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            raw = raw.rstrip("\n")
            if not raw:
                continue
            parts = raw.split("\t", 2)
            if len(parts) != 3:
                raise ReplayFormatError(f"line {lineno}: expected 3 tab-separated fields")
            try:
                offset_ms = int(parts[0])
            except ValueError:
                raise ReplayFormatError(f"line {lineno}: bad offset {parts[0]!r}") from None
            if offset_ms < 0:
                raise ReplayFormatError(f"line {lineno}: negative offset")
            yield ReplayRecord(offset_ms, parts[1], parts[2])


def _check_sorted(records: Iterable[ReplayRecord]) -> None:
    prev = -1
    for i, rec in enumerate(records):
        if rec.offset_ms < prev:
            raise ReplayFormatError(f"record {i}: offsets not sorted")
        prev = rec.offset_ms


def load_replay_records(source) -> list[ReplayRecord]:
    """Materialize and validate replay records (sorted offsets, ties kept)."""
    if isinstance(source, (str, Path)):
        records = list(_iter_replay_lines(source))
    else:
        records = list(source)
    _check_sorted(records)
    return records


def replay(
    source,
    speedup: float,
    sink: Callable[[RecentChange], None],
    clock: VirtualClock,
    start: float = 0.0,
) -> ReplaySummary:
    """Deliver replay records through the parser at offset/speedup pacing.

    The virtual clock, not wall time, stamps every change, so downstream
    results are identical at any speedup. Unparseable payloads are
    counted and skipped; they never abort the stream.
    """
    if not (speedup > 0):
        raise ValueError("speedup must be positive")
    if isinstance(source, (str, Path)):
        # validate ordering in a cheap first pass, then stream the second
        # pass so million-record files never sit in memory at once
        _check_sorted(_iter_replay_lines(source))
        records: Iterable[ReplayRecord] = _iter_replay_lines(source)
    else:
        records = load_replay_records(source)

    summary = ReplaySummary()
    wall_start = time.monotonic()
    for rec in records:
        ts = start + rec.offset_ms / 1000.0
        if math.isfinite(speedup):
            target = wall_start + rec.offset_ms / 1000.0 / speedup
            delay = target - time.monotonic()
            if delay > 0:
                time.sleep(delay)
        clock.advance_to(ts)
        try:
            change = parse_rc_line(RawLine(rec.channel, rec.payload, ts))
        except ParseError:
            summary.skipped += 1
            continue
        sink(change)
        summary.delivered += 1
    return summary

"""Live IRC feed client.

Joins one recent-changes room per monitored language on
irc.wikimedia.org, read-only (NICK/USER/JOIN and PING replies; nothing
is ever sent to the rooms). Disconnects trigger reconnection with
exponential backoff; connection state is surfaced through a health dict
rather than raised to callers once startup has succeeded.
"""

from __future__ import annotations

import logging
import random
import socket
import threading
import time
from typing import Callable, Iterable, Optional

from .rc_ingest import ParseError, RawLine, RecentChange, channel_for_language, parse_rc_line

logger = logging.getLogger(__name__)

RECONNECT_INITIAL_SECS = 1.0
RECONNECT_CAP_SECS = 60.0


def interpret_irc_line(line: str, now: float) -> Optional[tuple[str, object]]:
    """Map one server line to an action: ("pong", token) or ("deliver", RawLine)."""
    if line.startswith("PING"):
        _, _, token = line.partition(" ")
        return ("pong", token)
    if " PRIVMSG " in line:
        prefix, _, rest = line.partition(" PRIVMSG ")
        channel, _, payload = rest.partition(" :")
        channel = channel.strip()
        if channel and payload:
            return ("deliver", RawLine(channel, payload, now))
    return None


class IrcClient:
    def __init__(
        self,
        languages: Iterable[str],
        sink: Callable[[RecentChange], None],
        server: str = "irc.wikimedia.org",
        port: int = 6667,
        nick: Optional[str] = None,
    ):
        self.channels = [channel_for_language(lang) for lang in languages]
        if not self.channels:
            raise ValueError("languages must be non-empty")
        self.sink = sink
        self.server = server
        self.port = port
        self.nick = nick or f"wikimon{random.randrange(100000):05d}"
        self.health = {"connected": False, "channels": len(self.channels), "parse_errors": 0}
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._sock: Optional[socket.socket] = None

    def start(self) -> "IrcClient":
        self._thread = threading.Thread(target=self._run, name="irc-client", daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._stop.set()
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        if self._thread is not None:
            self._thread.join(timeout=5)

    def _run(self) -> None:
        backoff = RECONNECT_INITIAL_SECS
        while not self._stop.is_set():
            try:
                self._session()
                backoff = RECONNECT_INITIAL_SECS
            except OSError as exc:
                self.health["connected"] = False
                logger.warning("irc connection lost (%s); retrying in %.0fs", exc, backoff)
            if self._stop.wait(backoff):
                break
            backoff = min(backoff * 2, RECONNECT_CAP_SECS)

    def _session(self) -> None:
        sock = socket.create_connection((self.server, self.port), timeout=30)
        self._sock = sock
        out = sock.makefile("wb")
        inp = sock.makefile("rb")

        def send(line: str) -> None:
            out.write((line + "\r\n").encode("utf-8"))
            out.flush()

        send(f"NICK {self.nick}")
        send(f"USER {self.nick} 0 * :{self.nick}")
        for channel in self.channels:
            send(f"JOIN {channel}")
        self.health["connected"] = True
        logger.info("joined %d channels on %s", len(self.channels), self.server)

        for raw in inp:
            if self._stop.is_set():
                break
            line = raw.decode("utf-8", errors="replace").rstrip("\r\n")
            action = interpret_irc_line(line, time.time())
            if action is None:
                continue
            kind, value = action
            if kind == "pong":
                send(f"PONG {value}")
            else:
                try:
                    self.sink(parse_rc_line(value))
                except ParseError as exc:
                    self.health["parse_errors"] += 1
                    logger.debug("unparseable line: %s", exc)
        self.health["connected"] = False


def connect_live(languages: Iterable[str], sink: Callable[[RecentChange], None], **kwargs) -> IrcClient:
    """Join one room per language and stream parsed changes to the sink."""
    return IrcClient(languages, sink, **kwargs).start()

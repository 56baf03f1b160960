"""Event gateway: push channel, verdict intake, persistence.

Monitor events are serialized once and fanned out to every connected
client over a persistent push connection (`/events`). Evaluators submit
verdicts over HTTP (`/verdicts`). Candidates and verdicts are appended
to a newline-delimited JSON run log; replaying that log reconstructs
the candidate store byte-identically.
"""

from __future__ import annotations

import json
import logging
import os
import queue
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from .clock import isoformat_ms
from .monitor_core import BREAKING_NEWS_CANDIDATE
from .plausibility import (
    CandidateStore,
    DuplicateVerdictError,
    UnknownCandidateError,
    Verdict,
)

logger = logging.getLogger(__name__)

CLIENT_BACKLOG_LIMIT = 1000

VERDICT = "verdict"
PLAUSIBILITY_RESULT = "plausibilityResult"
STATS = "stats"


@dataclass(frozen=True)
class WireEvent:
    kind: str
    seq: int
    payload: dict
    emitted_at: float

    def serialize(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "seq": self.seq,
                "payload": self.payload,
                "emitted_at": isoformat_ms(self.emitted_at),
            },
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=False,
        )


class Subscription:
    """One client's bounded event backlog.

    A client that falls more than CLIENT_BACKLOG_LIMIT events behind is
    disconnected rather than allowed to stall the broadcaster.
    """

    def __init__(self, backlog: int = CLIENT_BACKLOG_LIMIT):
        self._queue: queue.Queue = queue.Queue(maxsize=backlog)
        self.dropped = False

    def offer(self, data: str) -> bool:
        try:
            self._queue.put_nowait(data)
            return True
        except queue.Full:
            self.dropped = True
            return False

    def get(self, timeout: Optional[float] = None) -> Optional[str]:
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            return None


class Broadcaster:
    def __init__(self):
        self._subs: list[Subscription] = []
        self._lock = threading.Lock()

    def subscribe(self, backlog: int = CLIENT_BACKLOG_LIMIT) -> Subscription:
        sub = Subscription(backlog)
        with self._lock:
            self._subs.append(sub)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subs:
                self._subs.remove(sub)

    def publish(self, data: str) -> int:
        """Fan one serialized event out to all clients; returns delivered count."""
        with self._lock:
            subs = list(self._subs)
        delivered = 0
        for sub in subs:
            if sub.offer(data):
                delivered += 1
            else:
                self.unsubscribe(sub)
        return delivered

    def client_count(self) -> int:
        with self._lock:
            return len(self._subs)


class EventLog:
    """Append-only newline-delimited JSON run log, single writer."""

    def __init__(self, path: Path, fsync: bool = False):
        self.path = Path(path)
        self.fsync = fsync
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")
        self._offset = sum(1 for _ in open(self.path, "r", encoding="utf-8"))
        self._lock = threading.Lock()

    def append(self, record: dict) -> int:
        line = json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        with self._lock:
            self._fh.write(line + "\n")
            self._fh.flush()
            if self.fsync:
                os.fsync(self._fh.fileno())
            offset = self._offset
            self._offset += 1
        return offset

    def close(self) -> None:
        self._fh.close()


def read_log(path: Path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def rebuild_store(path: Path) -> CandidateStore:
    """Reconstruct the candidate/verdict store by replaying the run log."""
    store = CandidateStore()
    for record in read_log(path):
        kind = record.get("kind")
        if kind == BREAKING_NEWS_CANDIDATE:
            store.add_payload(record["payload"])
        elif kind == VERDICT:
            store.apply_verdict_payload(record["payload"])
    return store


class Gateway:
    """Single funnel for emitted events, verdicts, and persistence."""

    def __init__(self, store: CandidateStore, log: Optional[EventLog] = None, clock=None):
        self.store = store
        self.log = log
        self.clock = clock
        self.broadcaster = Broadcaster()
        self.health: dict = {"status": "ok", "ingest": {"mode": "idle", "connected": False}}
        self._seq = 0
        self._verdict_lock = threading.Lock()
        self.verdicts_recorded = 0

    def _now(self) -> float:
        return self.clock.now() if self.clock else time.time()

    def emit(self, kind: str, payload: dict) -> WireEvent:
        self._seq += 1
        event = WireEvent(kind, self._seq, payload, self._now())
        if self.broadcaster.client_count():
            self.broadcaster.publish(event.serialize())
        return event

    def persist(self, kind: str, payload: dict) -> int:
        if self.log is None:
            return -1
        return self.log.append({"kind": kind, "payload": payload})

    def serve_verdict(self, body: dict) -> tuple[int, dict]:
        """Record a verdict; returns (http_status, response_body)."""
        try:
            verdict = Verdict(
                candidate_id=str(body["candidate_id"]),
                decision=str(body["decision"]),
                evaluator=str(body["evaluator"]),
                decided_at=self._now(),
                note=body.get("note"),
            )
        except (KeyError, ValueError) as exc:
            return 400, {"error": f"bad verdict submission: {exc}"}
        with self._verdict_lock:
            try:
                record = self.store.record_verdict(verdict)
            except UnknownCandidateError:
                return 404, {"error": f"unknown candidate {verdict.candidate_id}"}
            except DuplicateVerdictError:
                return 409, {"error": f"candidate {verdict.candidate_id} already decided"}
            self.persist(VERDICT, record)
            self.verdicts_recorded += 1
        self.emit(VERDICT, record)
        return 200, {"ok": True, "candidate": self.store.get(verdict.candidate_id)}


def build_app(gateway: Gateway):
    """FastAPI application exposing the gateway's external interfaces."""
    app = FastAPI(title="wikimon gateway")

    @app.get("/healthz")
    def healthz():
        return gateway.health

    @app.get("/candidates")
    def candidates():
        return {"candidates": gateway.store.list_payloads()}

    @app.post("/verdicts")
    async def verdicts(body: dict):
        status, payload = gateway.serve_verdict(body)
        return JSONResponse(payload, status_code=status)

    @app.websocket("/events")
    async def events(ws: WebSocket):
        await ws.accept()
        sub = gateway.broadcaster.subscribe()
        try:
            while True:
                data = await run_in_threadpool(sub.get, 0.25)
                if data is not None:
                    await ws.send_text(data)
                elif sub.dropped:
                    break
        except WebSocketDisconnect:
            pass
        finally:
            gateway.broadcaster.unsubscribe(sub)

    return app

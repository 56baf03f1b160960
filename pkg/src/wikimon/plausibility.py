"""Cross-language plausibility checks and evaluator verdicts.

When a candidate fires, the titles of every language version in its
cluster become full-text search queries against pluggable social-search
connectors. The results are evidence for a human evaluator, who confirms
or rejects the candidate; nothing here auto-confirms.

The reference connector is corpus-backed: canned hit lists stored under
``corpus/<connector>/<sha1-of-query-text>.json``. Live connectors are
optional plugins implementing the same search contract.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol

from .clock import isoformat_ms
from .monitor_core import CONFIRMED, PENDING, REJECTED, Candidate

CONNECTOR_TIMEOUT_SECS = 10.0

STATUS_OK = "ok"
STATUS_EMPTY = "empty"
STATUS_ERROR = "error"


class UnknownCandidateError(KeyError):
    pass


class DuplicateVerdictError(ValueError):
    pass


@dataclass(frozen=True)
class SearchQuery:
    language: str
    query_text: str


@dataclass(frozen=True)
class PlausibilityResult:
    connector: str
    query: SearchQuery
    hits: tuple[dict, ...]  # {author, text, posted_at, source_url}
    fetched_at: float
    status: str

    def to_payload(self) -> dict:
        return {
            "connector": self.connector,
            "query": {"language": self.query.language, "query_text": self.query.query_text},
            "hits": list(self.hits),
            "fetched_at": isoformat_ms(self.fetched_at),
            "status": self.status,
        }


@dataclass(frozen=True)
class Verdict:
    candidate_id: str
    decision: str  # confirmed | rejected
    evaluator: str
    decided_at: float
    note: Optional[str] = None

    def __post_init__(self):
        if self.decision not in (CONFIRMED, REJECTED):
            raise ValueError(f"bad decision {self.decision!r}")


class Connector(Protocol):
    name: str

    def search(self, query: SearchQuery) -> list[dict]: ...


def query_corpus_key(query_text: str) -> str:
    return hashlib.sha1(query_text.encode("utf-8")).hexdigest()


class CorpusConnector:
    """Reads canned search results from a local content-addressed corpus."""

    def __init__(self, name: str, corpus_root: Path):
        self.name = name
        self.corpus_root = Path(corpus_root)

    def search(self, query: SearchQuery) -> list[dict]:
        path = self.corpus_root / self.name / (query_corpus_key(query.query_text) + ".json")
        body = json.loads(path.read_text(encoding="utf-8"))
        return list(body.get("hits", []))


def build_queries(candidate: Candidate) -> list[SearchQuery]:
    """One query per cluster member, deduplicated on (language, text)."""
    seen = set()
    queries = []
    for key in sorted(candidate.members, key=lambda k: (k.language, k.title)):
        pair = (key.language, key.title)
        if pair in seen:
            continue
        seen.add(pair)
        queries.append(SearchQuery(key.language, key.title))
    return queries


def run_checks(
    candidate: Candidate,
    connectors: list[Connector],
    clock=None,
    timeout: float = CONNECTOR_TIMEOUT_SECS,
    on_result=None,
) -> list[PlausibilityResult]:
    """Run every (connector, query) pair to exactly one result.

    Connector failures and timeouts isolate to a status=error result;
    they never propagate. Results are attached to the candidate and,
    when a callback is given, pushed out as they arrive, in a fixed
    (connector, query) order so replay runs stay deterministic.
    """
    queries = [SearchQuery(lang, text) for lang, text in candidate.queries]
    if not queries:
        queries = build_queries(candidate)

    now = clock.now() if clock else time.time()
    results: list[PlausibilityResult] = []
    with ThreadPoolExecutor(max_workers=max(1, len(connectors))) as pool:
        for connector in connectors:
            for query in queries:
                future = pool.submit(connector.search, query)
                try:
                    hits = future.result(timeout=timeout)
                    status = STATUS_OK if hits else STATUS_EMPTY
                    result = PlausibilityResult(
                        connector.name, query, tuple(hits), now, status
                    )
                except Exception:
                    future.cancel()
                    result = PlausibilityResult(connector.name, query, (), now, STATUS_ERROR)
                results.append(result)
                candidate.plausibility.append(result)
                if on_result is not None:
                    on_result(result)
    return results


class CandidateStore:
    """Candidate state as persisted: one payload dict per candidate.

    Verdicts are applied through the same code path whether they arrive
    live over HTTP or from replaying the run log, so a log replay
    reconstructs the store byte-identically.
    """

    def __init__(self):
        self._payloads: dict[str, dict] = {}

    def add_payload(self, payload: dict) -> None:
        self._payloads[payload["candidate_id"]] = payload

    def add(self, candidate: Candidate) -> dict:
        payload = candidate.to_payload()
        self.add_payload(payload)
        return payload

    def get(self, candidate_id: str) -> dict:
        try:
            return self._payloads[candidate_id]
        except KeyError:
            raise UnknownCandidateError(candidate_id) from None

    def list_payloads(self) -> list[dict]:
        return [self._payloads[k] for k in sorted(self._payloads)]

    def __len__(self) -> int:
        return len(self._payloads)

    def apply_verdict_payload(self, record: dict) -> dict:
        payload = self.get(record["candidate_id"])
        if payload["verdict"] != PENDING:
            raise DuplicateVerdictError(record["candidate_id"])
        payload["verdict"] = record["decision"]
        payload["verdict_by"] = record["evaluator"]
        payload["verdict_at"] = record["decided_at"]
        payload["verdict_note"] = record.get("note")
        return payload

    def record_verdict(self, verdict: Verdict) -> dict:
        """Apply a live verdict; returns the verdict record for the log."""
        record = {
            "candidate_id": verdict.candidate_id,
            "decision": verdict.decision,
            "evaluator": verdict.evaluator,
            "decided_at": isoformat_ms(verdict.decided_at),
            "note": verdict.note,
        }
        self.apply_verdict_payload(record)
        return record

    def dump_bytes(self) -> bytes:
        return json.dumps(
            {"candidates": self.list_payloads()},
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=False,
        ).encode("utf-8")

"""End-to-end wiring: changes in, candidates out.

One logical consumer drives everything: each parsed change is resolved
to a cluster (fetching langlinks as needed), classified, and fed to the
monitor; due eviction ticks run between edits. All monitor events flow
to the gateway, and a firing candidate triggers the plausibility checks
before its record is persisted.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Optional

from . import plausibility as plaus
from .clock import VirtualClock
from .edit_classifier import ClassifierConfig, DiffClient, classify
from .gateway import PLAUSIBILITY_RESULT, STATS, Gateway
from .lang_graph import ClusterIndex, LangLinksClient, article_key
from .monitor_core import (
    BREAKING_NEWS_CANDIDATE,
    Candidate,
    CriteriaConfig,
    Emitted,
    Monitor,
)
from .rc_ingest import RecentChange, is_meta_title, replay

logger = logging.getLogger(__name__)


@dataclass
class RunSummary:
    events_ingested: int = 0
    parse_errors: int = 0
    filtered: int = 0
    clusters_created: int = 0
    candidates_fired: int = 0
    verdicts_recorded: int = 0

    def format(self) -> str:
        return (
            f"events ingested:    {self.events_ingested}\n"
            f"parse errors:       {self.parse_errors}\n"
            f"filtered (meta/ns): {self.filtered}\n"
            f"clusters created:   {self.clusters_created}\n"
            f"candidates fired:   {self.candidates_fired}\n"
            f"verdicts recorded:  {self.verdicts_recorded}"
        )


class Pipeline:
    def __init__(
        self,
        monitor: Monitor,
        index: ClusterIndex,
        links_client: LangLinksClient,
        gateway: Gateway,
        connectors: Optional[list] = None,
        diff_client: Optional[DiffClient] = None,
        classifier_config: ClassifierConfig = ClassifierConfig(),
        clock=None,
    ):
        self.monitor = monitor
        self.index = index
        self.links_client = links_client
        self.gateway = gateway
        self.connectors = connectors or []
        self.diff_client = diff_client
        self.classifier_config = classifier_config
        self.clock = clock
        self.events_ingested = 0
        self.filtered = 0
        self._next_tick: Optional[float] = None

    def start_ticks(self, at: float) -> None:
        self._next_tick = at + self.monitor.criteria.eviction_period_secs

    def _run_due_ticks(self, upto: float) -> None:
        # Ticks due at or before the incoming edit run first: an edit
        # landing exactly at the TTL boundary sees its cluster evicted
        # and starts a fresh lifetime.
        if self._next_tick is None:
            return
        period = self.monitor.criteria.eviction_period_secs
        while self._next_tick <= upto:
            tick_at = self._next_tick
            self.tick(tick_at)
            self._next_tick = tick_at + period

    def tick(self, now: float) -> None:
        """One eviction pass; releases the evicted clusters' link graph keys."""
        for cluster_id in self.monitor.evict(now):
            self.index.release(cluster_id)
        self.gateway.emit(STATS, self._stats_payload())

    def _stats_payload(self) -> dict:
        return {
            "live_clusters": len(self.monitor.clusters),
            "clusters_created": self.monitor.clusters_created,
            "candidates_fired": self.monitor.candidates_fired,
            "events_ingested": self.events_ingested,
        }

    def _classify(self, change: RecentChange):
        diff = None
        if (
            self.diff_client is not None
            and change.diff_rev is not None
            and change.old_rev is not None
        ):
            diff = self.diff_client.fetch_diff(
                change.language, change.old_rev, change.diff_rev
            )
        return classify(diff, change.comment, change.delta, self.classifier_config)

    def on_change(self, change: RecentChange) -> None:
        self._run_due_ticks(change.timestamp)
        self.events_ingested += 1

        if is_meta_title(change.title):
            self.filtered += 1
            return

        key = article_key(change.language, change.title)
        links = self.links_client.fetch_langlinks(key)
        cluster_id, absorbed = self.index.resolve(key, links.siblings)

        events: list[Emitted] = []
        for old_id in absorbed:
            events += self.monitor.merge(
                cluster_id,
                old_id,
                members=self.index.members_of(cluster_id),
                now=change.timestamp,
            )

        edit_class = self._classify(change)
        events += self.monitor.ingest_edit(
            change,
            cluster_id,
            edit_class,
            key,
            members=self.index.members_of(cluster_id),
        )
        for event in events:
            self._handle(event)

    def _handle(self, event: Emitted) -> None:
        if event.kind == BREAKING_NEWS_CANDIDATE:
            self._handle_candidate(event.candidate)
        else:
            self.gateway.emit(event.kind, event.cluster.snapshot())

    def _handle_candidate(self, candidate: Candidate) -> None:
        candidate.queries = [
            (q.language, q.query_text) for q in plaus.build_queries(candidate)
        ]
        self.gateway.emit(BREAKING_NEWS_CANDIDATE, candidate.to_payload())
        if self.connectors:
            plaus.run_checks(
                candidate,
                self.connectors,
                clock=self.clock,
                on_result=lambda r: self.gateway.emit(
                    PLAUSIBILITY_RESULT,
                    {"candidate_id": candidate.candidate_id, **r.to_payload()},
                ),
            )
        payload = self.gateway.store.add(candidate)
        self.gateway.persist(BREAKING_NEWS_CANDIDATE, payload)

    def summary(self, parse_errors: int = 0) -> RunSummary:
        return RunSummary(
            events_ingested=self.events_ingested,
            parse_errors=parse_errors,
            filtered=self.filtered,
            clusters_created=self.monitor.clusters_created,
            candidates_fired=self.monitor.candidates_fired,
            verdicts_recorded=self.gateway.verdicts_recorded,
        )


def run_replay(
    pipeline: Pipeline,
    replay_file,
    speedup: float,
    clock: VirtualClock,
    start: float = 0.0,
) -> RunSummary:
    pipeline.start_ticks(start)
    result = replay(replay_file, speedup, pipeline.on_change, clock, start=start)
    return pipeline.summary(parse_errors=result.skipped)

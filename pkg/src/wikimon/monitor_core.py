"""Cluster monitoring loop.

Two responsibilities, mirroring the service's two event loops: update
per-cluster rolling statistics on every incoming edit and fire a
breaking-news candidate the first time all four criteria hold, and
periodically evict clusters that have gone idle past their time-to-live.

Criteria semantics:
  - occurrences / editors / gaps are computed over *counted* edits only;
    Trivial edits (and bot edits, unless configured otherwise) stay in
    the timeline but are disregarded for the criteria.
  - "seconds between edits" is the maximum gap between consecutive
    counted edits over the cluster's lifetime, which makes firing
    monotone: once a 61 s gap happens the cluster can never fire in this
    lifetime.
  - a cluster fires at most once per lifetime; eviction ends a lifetime
    and a later spike on the same topic starts a new one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .clock import isoformat_ms
from .edit_classifier import TRIVIAL, EditClass
from .lang_graph import ArticleKey
from .rc_ingest import RecentChange

NEW_CLUSTER = "newCluster"
EXISTING_CLUSTER = "existingCluster"
BREAKING_NEWS_CANDIDATE = "breakingNewsCandidate"

PENDING = "pending"
CONFIRMED = "confirmed"
REJECTED = "rejected"


@dataclass(frozen=True)
class CriteriaConfig:
    min_occurrences: int = 5
    max_secs_between_edits: int = 60
    min_concurrent_editors: int = 2
    max_secs_since_last_edit: int = 240
    ttl_secs: int = 240
    eviction_period_secs: int = 240

    def __post_init__(self):
        values = (
            self.min_occurrences,
            self.max_secs_between_edits,
            self.min_concurrent_editors,
            self.max_secs_since_last_edit,
            self.ttl_secs,
            self.eviction_period_secs,
        )
        if any(v <= 0 for v in values):
            raise ValueError("criteria values must be positive")
        if self.ttl_secs < self.max_secs_since_last_edit:
            raise ValueError("ttl_secs must be >= max_secs_since_last_edit")


@dataclass(frozen=True)
class EditRecord:
    timestamp: float
    editor: str
    key: ArticleKey
    delta: int
    level: str
    counted: bool


@dataclass
class Cluster:
    id: int
    members: set[ArticleKey]
    edits: list[EditRecord] = field(default_factory=list)
    editors: set[str] = field(default_factory=set)  # over counted edits
    created_at: float = 0.0
    last_edit_at: float = 0.0
    last_counted_at: Optional[float] = None
    occurrences: int = 0  # counted edits
    max_gap_secs: float = 0.0
    candidate_fired: bool = False

    def snapshot(self) -> dict:
        return {
            "cluster_id": self.id,
            "members": [
                {"language": k.language, "title": k.title}
                for k in sorted(self.members, key=lambda k: (k.language, k.title))
            ],
            "occurrences": self.occurrences,
            "edit_count": len(self.edits),
            "editors": sorted(self.editors),
            "created_at": isoformat_ms(self.created_at),
            "last_edit_at": isoformat_ms(self.last_edit_at),
            "max_gap_secs": self.max_gap_secs,
            "candidate_fired": self.candidate_fired,
        }


@dataclass
class Candidate:
    candidate_id: str
    cluster_id: int
    members: tuple[ArticleKey, ...]
    fired_at: float
    occurrences: int
    editors: tuple[str, ...]
    timeline: tuple[EditRecord, ...]
    queries: list[tuple[str, str]] = field(default_factory=list)
    plausibility: list = field(default_factory=list)
    verdict: str = PENDING
    verdict_by: Optional[str] = None
    verdict_at: Optional[float] = None

    def to_payload(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "cluster_id": self.cluster_id,
            "members": [
                {"language": k.language, "title": k.title} for k in self.members
            ],
            "fired_at": isoformat_ms(self.fired_at),
            "occurrences": self.occurrences,
            "editors": list(self.editors),
            "timeline": [
                {
                    "at": isoformat_ms(e.timestamp),
                    "editor": e.editor,
                    "language": e.key.language,
                    "title": e.key.title,
                    "delta": e.delta,
                    "level": e.level,
                    "counted": e.counted,
                }
                for e in self.timeline
            ],
            "queries": [{"language": l, "query_text": t} for l, t in self.queries],
            "plausibility": [r.to_payload() for r in self.plausibility],
            "verdict": self.verdict,
            "verdict_by": self.verdict_by,
            "verdict_at": isoformat_ms(self.verdict_at) if self.verdict_at else None,
            "verdict_note": None,
        }


@dataclass(frozen=True)
class Emitted:
    kind: str
    at: float
    cluster: Optional[Cluster] = None
    candidate: Optional[Candidate] = None


def is_bot_editor(editor: str, extra: frozenset[str] = frozenset()) -> bool:
    return editor.endswith(("bot", "Bot")) or editor in extra


class Monitor:
    """Owns all cluster state; must be driven from a single consumer."""

    def __init__(
        self,
        criteria: CriteriaConfig = CriteriaConfig(),
        include_bots: bool = False,
        bot_handles: Iterable[str] = (),
    ):
        self.criteria = criteria
        self.include_bots = include_bots
        self.bot_handles = frozenset(bot_handles)
        self.clusters: dict[int, Cluster] = {}
        self.clusters_created = 0
        self.candidates_fired = 0

    def _is_counted(self, editor: str, edit_class: EditClass) -> bool:
        if edit_class.level == TRIVIAL:
            return False
        if not self.include_bots and is_bot_editor(editor, self.bot_handles):
            return False
        return True

    def ingest_edit(
        self,
        change: RecentChange,
        cluster_id: int,
        edit_class: EditClass,
        key: ArticleKey,
        members: Optional[set[ArticleKey]] = None,
    ) -> list[Emitted]:
        now = change.timestamp
        record = EditRecord(
            timestamp=now,
            editor=change.editor,
            key=key,
            delta=change.delta,
            level=edit_class.level,
            counted=self._is_counted(change.editor, edit_class),
        )

        events: list[Emitted] = []
        cluster = self.clusters.get(cluster_id)
        if cluster is None:
            cluster = Cluster(
                id=cluster_id,
                members=members if members is not None else {key},
                created_at=now,
            )
            self.clusters[cluster_id] = cluster
            self.clusters_created += 1
            self._apply(cluster, record)
            events.append(Emitted(NEW_CLUSTER, now, cluster=cluster))
        else:
            if members is not None:
                cluster.members = members
            else:
                cluster.members.add(key)
            self._apply(cluster, record)
            events.append(Emitted(EXISTING_CLUSTER, now, cluster=cluster))

        candidate = self._check_criteria(cluster, now)
        if candidate is not None:
            events.append(Emitted(BREAKING_NEWS_CANDIDATE, now, cluster=cluster, candidate=candidate))
        return events

    def _apply(self, cluster: Cluster, record: EditRecord) -> None:
        cluster.edits.append(record)
        cluster.last_edit_at = record.timestamp
        if record.counted:
            if cluster.last_counted_at is not None:
                gap = record.timestamp - cluster.last_counted_at
                if gap > cluster.max_gap_secs:
                    cluster.max_gap_secs = gap
            cluster.occurrences += 1
            cluster.editors.add(record.editor)
            cluster.last_counted_at = record.timestamp

    def _criteria_hold(self, cluster: Cluster, now: float) -> bool:
        c = self.criteria
        return (
            cluster.occurrences >= c.min_occurrences
            and cluster.max_gap_secs <= c.max_secs_between_edits
            and len(cluster.editors) >= c.min_concurrent_editors
            and cluster.last_counted_at is not None
            and now - cluster.last_counted_at <= c.max_secs_since_last_edit
        )

    def _check_criteria(self, cluster: Cluster, now: float) -> Optional[Candidate]:
        if cluster.candidate_fired or not self._criteria_hold(cluster, now):
            return None
        return self._fire(cluster, fired_at=now)

    def _fire(self, cluster: Cluster, fired_at: float) -> Candidate:
        cluster.candidate_fired = True
        self.candidates_fired += 1
        candidate = Candidate(
            candidate_id=f"cand-{self.candidates_fired}",
            cluster_id=cluster.id,
            members=tuple(
                sorted(cluster.members, key=lambda k: (k.language, k.title))
            ),
            fired_at=fired_at,
            occurrences=cluster.occurrences,
            editors=tuple(sorted(cluster.editors)),
            timeline=tuple(cluster.edits),
        )
        return candidate

    def merge(
        self,
        into_id: int,
        from_id: int,
        members: Optional[set[ArticleKey]] = None,
        now: Optional[float] = None,
    ) -> list[Emitted]:
        """Merge two live clusters after langlinks revealed one topic.

        Timelines are interleaved by timestamp and statistics recomputed
        from scratch on the merged history. If the merged history would
        already have satisfied the criteria, the candidate fires with
        fired_at set to the edit that first satisfied them.
        """
        a = self.clusters.get(into_id)
        b = self.clusters.pop(from_id, None)
        if b is None:
            return []
        if a is None:
            b.id = into_id
            self.clusters[into_id] = b
            if members is not None:
                b.members = members
            return []

        already_fired = a.candidate_fired or b.candidate_fired
        merged_edits = sorted(a.edits + b.edits, key=lambda e: e.timestamp)
        a.edits = []
        a.editors = set()
        a.occurrences = 0
        a.max_gap_secs = 0.0
        a.last_counted_at = None
        a.created_at = merged_edits[0].timestamp if merged_edits else a.created_at
        a.candidate_fired = already_fired
        if members is not None:
            a.members = members
        else:
            a.members |= b.members

        events: list[Emitted] = []
        fire_at: Optional[float] = None
        for record in merged_edits:
            self._apply(a, record)
            if fire_at is None and not already_fired and self._criteria_hold(a, record.timestamp):
                fire_at = record.timestamp
        if fire_at is not None:
            candidate = self._fire(a, fired_at=fire_at)
            events.append(
                Emitted(
                    BREAKING_NEWS_CANDIDATE,
                    now if now is not None else fire_at,
                    cluster=a,
                    candidate=candidate,
                )
            )
        return events

    def evict(self, now: float) -> list[int]:
        """Drop every cluster idle for at least ttl_secs; return their ids."""
        ttl = self.criteria.ttl_secs
        removed = [
            cid
            for cid, cluster in self.clusters.items()
            if now - cluster.last_edit_at >= ttl
        ]
        for cid in removed:
            del self.clusters[cid]
        return removed

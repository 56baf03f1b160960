"""Cross-language article identity.

An article is keyed by (language, canonical title). The langlinks API
tells us which articles in other editions cover the same topic; linked
keys are unioned into one cluster so concurrent edits across editions
count together. Linkage is treated as undirected: langlinks on Wikipedia
can be asymmetric or stale, and a one-way link is evidence enough.
"""

from __future__ import annotations

import json
import logging
import time
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional
from urllib.parse import quote

from .rc_ingest import canonical_title

logger = logging.getLogger(__name__)

LANGLINKS_CACHE_TTL_SECS = 6 * 3600
LANGLINKS_CACHE_CAPACITY = 100_000


@dataclass(frozen=True)
class ArticleKey:
    language: str
    title: str

    def __post_init__(self):
        if not self.language or not self.title:
            raise ValueError("ArticleKey fields must be non-empty")


def article_key(language: str, title: str) -> ArticleKey:
    """Build a key in canonical form.

    Underscores become spaces and the first character is uppercased
    (MediaWiki's first-letter convention), so "pope Benedict_XVI" and
    "Pope Benedict XVI" compare equal.
    """
    t = canonical_title(title)
    if t:
        t = t[0].upper() + t[1:]
    return ArticleKey(language, t)


@dataclass(frozen=True)
class LangLinkSet:
    source: ArticleKey
    siblings: frozenset[ArticleKey]
    fetched_at: float
    resolved: bool = True  # False when the API could not be reached


def langlinks_url(key: ArticleKey) -> str:
    return (
        f"http://{key.language}.wikipedia.org/w/api.php"
        f"?action=query&format=json&prop=langlinks"
        f"&titles={quote(key.title, safe='')}&lllimit=500"
    )


def parse_langlinks_response(key: ArticleKey, body: dict, fetched_at: float) -> LangLinkSet:
    siblings: dict[str, ArticleKey] = {}
    pages = body.get("query", {}).get("pages", {})
    for page in pages.values():
        for link in page.get("langlinks", []) or []:
            lang = link.get("lang")
            title = link.get("*") or link.get("title")
            if not lang or not title:
                continue
            sib = article_key(lang, title)
            if sib != key and lang not in siblings:
                siblings[lang] = sib
    return LangLinkSet(key, frozenset(siblings.values()), fetched_at)


class _TtlLruCache:
    def __init__(self, capacity: int, ttl: float):
        self.capacity = capacity
        self.ttl = ttl
        self._data: OrderedDict = OrderedDict()

    def get(self, k, now: float):
        entry = self._data.get(k)
        if entry is None:
            return None
        value, expires = entry
        if now >= expires:
            del self._data[k]
            return None
        self._data.move_to_end(k)
        return value

    def put(self, k, value, now: float):
        self._data[k] = (value, now + self.ttl)
        self._data.move_to_end(k)
        while len(self._data) > self.capacity:
            self._data.popitem(last=False)


class LangLinksClient:
    """Fetches sibling sets, with a TTL/LRU cache and a fixture mode.

    With fixture_root set, responses come from
    ``<root>/langlinks/<lang>/<percent-encoded-title>.json`` (verbatim API
    bodies) and the network is never touched. Missing fixtures resolve to
    empty sibling sets so replay runs degrade to singleton clusters.
    """

    def __init__(
        self,
        fixture_root: Optional[Path] = None,
        session=None,
        cache_ttl: float = LANGLINKS_CACHE_TTL_SECS,
        cache_capacity: int = LANGLINKS_CACHE_CAPACITY,
        clock=None,
        offline: bool = False,
    ):
        self.fixture_root = Path(fixture_root) if fixture_root else None
        self.offline = offline
        self._session = session
        self._cache = _TtlLruCache(cache_capacity, cache_ttl)
        self._clock = clock

    def _now(self) -> float:
        return self._clock.now() if self._clock else time.time()

    def fetch_langlinks(self, key: ArticleKey) -> LangLinkSet:
        now = self._now()
        if self.fixture_root is None and self.offline:
            # replay without fixtures: every article is a singleton
            return LangLinkSet(key, frozenset(), now)
        cached = self._cache.get(key, now)
        if cached is not None:
            return cached
        if self.fixture_root is not None:
            links = self._fetch_fixture(key, now)
        else:
            links = self._fetch_http(key, now)
        self._cache.put(key, links, now)
        return links

    def _fetch_fixture(self, key: ArticleKey, now: float) -> LangLinkSet:
        path = (
            self.fixture_root
            / "langlinks"
            / key.language
            / (quote(key.title, safe="") + ".json")
        )
        if not path.is_file():
            return LangLinkSet(key, frozenset(), now)
        try:
            body = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            logger.warning("bad langlinks fixture %s", path)
            return LangLinkSet(key, frozenset(), now, resolved=False)
        return parse_langlinks_response(key, body, now)

    def _fetch_http(self, key: ArticleKey, now: float) -> LangLinkSet:
        if self._session is None:
            import requests

            self._session = requests.Session()
        url = langlinks_url(key)
        for attempt in (0, 1):
            try:
                resp = self._session.get(url, timeout=10)
                if resp.status_code == 429 and attempt == 0:
                    time.sleep(1)
                    continue
                resp.raise_for_status()
                return parse_langlinks_response(key, resp.json(), now)
            except Exception:
                if attempt == 0:
                    continue
                logger.warning("langlinks fetch failed for %s:%s", key.language, key.title)
        return LangLinkSet(key, frozenset(), now, resolved=False)


class ClusterIndex:
    """Union-find over ArticleKeys with stable cluster ids.

    Keys linked directly or transitively share one cluster id. When a
    union joins two existing clusters the smaller (older) id survives;
    the absorbed ids are reported so monitoring state can be merged.
    Evicted clusters release their keys so a later spike on the same
    topic starts a fresh lifetime.
    """

    def __init__(self):
        self._parent: dict[ArticleKey, ArticleKey] = {}
        self._rank: dict[ArticleKey, int] = {}
        self._root_id: dict[ArticleKey, int] = {}
        self._members: dict[int, set[ArticleKey]] = {}
        self._next_id = 0

    def _find(self, key: ArticleKey) -> ArticleKey:
        root = key
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[key] != root:  # path compression
            self._parent[key], key = root, self._parent[key]
        return root

    def _add(self, key: ArticleKey) -> ArticleKey:
        if key not in self._parent:
            self._parent[key] = key
            self._rank[key] = 0
            cid = self._next_id
            self._next_id += 1
            self._root_id[key] = cid
            self._members[cid] = {key}
        return self._find(key)

    def resolve(
        self, key: ArticleKey, siblings: Iterable[ArticleKey] = ()
    ) -> tuple[int, list[int]]:
        """Union key with its siblings; return (cluster_id, absorbed_ids)."""
        absorbed: list[int] = []
        root = self._add(key)
        for sib in siblings:
            sib_root = self._add(sib)
            root = self._find(key)
            if sib_root == root:
                continue
            keep_id, drop_id = self._root_id[root], self._root_id[sib_root]
            if drop_id < keep_id:
                keep_id, drop_id = drop_id, keep_id
            # union by rank
            if self._rank[root] < self._rank[sib_root]:
                root, sib_root = sib_root, root
            self._parent[sib_root] = root
            if self._rank[root] == self._rank[sib_root]:
                self._rank[root] += 1
            self._root_id.pop(sib_root, None)
            self._root_id[root] = keep_id
            self._members[keep_id] |= self._members.pop(drop_id)
            absorbed.append(drop_id)
        return self._root_id[self._find(key)], absorbed

    def cluster_of(self, key: ArticleKey, links: Optional[LangLinkSet] = None) -> int:
        siblings = links.siblings if links is not None else ()
        cid, _ = self.resolve(key, siblings)
        return cid

    def cluster_id(self, key: ArticleKey) -> Optional[int]:
        if key not in self._parent:
            return None
        return self._root_id[self._find(key)]

    def members_of(self, cluster_id: int) -> set[ArticleKey]:
        return self._members[cluster_id]

    def release(self, cluster_id: int) -> None:
        for key in self._members.pop(cluster_id, ()):  # evicted cluster
            self._parent.pop(key, None)
            self._rank.pop(key, None)
            self._root_id.pop(key, None)

    def __len__(self) -> int:
        return len(self._members)

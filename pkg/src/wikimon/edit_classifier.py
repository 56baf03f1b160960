"""Edit classification.

Revision diffs (from the compare API) are sorted into Trivial, Minor,
and Major edits so that, e.g., punctuation fixes do not count toward the
spike criteria. Classification is a pure, total function: when no diff
is available it degrades to delta/comment heuristics rather than block
the pipeline on a network call.
"""

from __future__ import annotations

import html
import json
import logging
import re
import time
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

TRIVIAL = "Trivial"
MINOR = "Minor"
MAJOR = "Major"

LIVING_PEOPLE_CATEGORY = "[[Category:Living people]]"

# present -> past substitutions that signal a fatality-style rewrite
TENSE_TABLE = {"is": "was", "are": "were", "has": "had"}


@dataclass(frozen=True)
class ClassifierConfig:
    trivial_delta_max: int = 6
    new_paragraph_bytes: int = 200


@dataclass(frozen=True)
class EditClass:
    level: str
    signals: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.signals and self.level != MAJOR:
            raise ValueError("signals imply a Major edit")


@dataclass(frozen=True)
class RevisionDiff:
    from_rev: int
    to_rev: int
    added: tuple[str, ...]
    removed: tuple[str, ...]
    net_delta: int
    available: bool = True


UNAVAILABLE_DIFF = RevisionDiff(0, 0, (), (), 0, available=False)


def compare_url(lang: str, from_rev: int, to_rev: int) -> str:
    if from_rev <= 0 or to_rev <= 0:
        raise ValueError("revision ids must be positive")
    return (
        f"http://{lang}.wikipedia.org/w/api.php"
        f"?action=compare&torev={to_rev}&fromrev={from_rev}&format=json"
    )


def diff_is_stale(diff: RevisionDiff, reported_delta: int) -> bool:
    """The compare response disagrees with the wire delta (tolerance 0)."""
    return diff.available and diff.net_delta != reported_delta


def _strip_punct_ws(text: str) -> str:
    return "".join(
        ch
        for ch in text
        if not ch.isspace() and not unicodedata.category(ch).startswith("P")
    )


def _is_tense_substitution(removed: str, added: str) -> bool:
    old_tokens = removed.split()
    new_tokens = added.split()
    if len(old_tokens) != len(new_tokens) or old_tokens == new_tokens:
        return False
    saw_substitution = False
    for old, new in zip(old_tokens, new_tokens):
        if old == new:
            continue
        if TENSE_TABLE.get(old) != new:
            return False
        saw_substitution = True
    return saw_substitution


def classify(
    diff: Optional[RevisionDiff],
    comment: str,
    delta: int,
    config: ClassifierConfig = ClassifierConfig(),
) -> EditClass:
    """Classify one edit. First matching rule wins.

    1. "Living people" category removed        -> Major
    2. one fragment adds a paragraph's worth   -> Major
    3. tiny delta, punctuation/whitespace only -> Trivial
    4. present -> past tense substitution      -> Major
    5. anything else                           -> Minor
    """
    if diff is None or not diff.available:
        # Heuristic fallback: without fragments we cannot prove an edit
        # trivial, so only a literal no-op is discounted.
        if delta == 0 and not comment:
            return EditClass(TRIVIAL)
        return EditClass(MINOR)

    if any(LIVING_PEOPLE_CATEGORY in frag for frag in diff.removed):
        return EditClass(MAJOR, frozenset({"living-people-removed"}))

    if any(
        len(frag.encode("utf-8")) >= config.new_paragraph_bytes for frag in diff.added
    ):
        return EditClass(MAJOR, frozenset({"new-paragraph"}))

    if abs(delta) <= config.trivial_delta_max and _strip_punct_ws(
        "".join(diff.removed)
    ) == _strip_punct_ws("".join(diff.added)):
        return EditClass(TRIVIAL)

    if any(
        _is_tense_substitution(old, new)
        for old, new in zip(diff.removed, diff.added)
    ):
        return EditClass(MAJOR, frozenset({"tense-change"}))

    return EditClass(MINOR)


_DIFF_CELL_RE = re.compile(
    r'<td[^>]*class="[^"]*diff-(addedline|deletedline)[^"]*"[^>]*>(.*?)</td>',
    re.S,
)
_TAG_RE = re.compile(r"<[^>]+>")


def parse_compare_response(from_rev: int, to_rev: int, body: dict) -> RevisionDiff:
    """Extract added/removed text fragments from a compare API body."""
    table = body.get("compare", {}).get("*", "") or ""
    added: list[str] = []
    removed: list[str] = []
    for kind, cell in _DIFF_CELL_RE.findall(table):
        text = html.unescape(_TAG_RE.sub("", cell))
        if kind == "addedline":
            added.append(text)
        else:
            removed.append(text)
    net = sum(len(a.encode("utf-8")) for a in added) - sum(
        len(r.encode("utf-8")) for r in removed
    )
    return RevisionDiff(from_rev, to_rev, tuple(added), tuple(removed), net)


class DiffClient:
    """Fetches revision diffs, with fixture mode mirroring LangLinksClient.

    Fixtures live at ``<root>/compare/<lang>/<from>_<to>.json``. Any
    failure yields an unavailable diff; classification then falls back
    to heuristics instead of blocking ingestion.
    """

    def __init__(self, fixture_root: Optional[Path] = None, session=None):
        self.fixture_root = Path(fixture_root) if fixture_root else None
        self._session = session

    def fetch_diff(self, lang: str, from_rev: int, to_rev: int) -> RevisionDiff:
        try:
            compare_url(lang, from_rev, to_rev)
        except ValueError:
            return UNAVAILABLE_DIFF
        if self.fixture_root is not None:
            return self._fetch_fixture(lang, from_rev, to_rev)
        return self._fetch_http(lang, from_rev, to_rev)

    def _fetch_fixture(self, lang: str, from_rev: int, to_rev: int) -> RevisionDiff:
        path = self.fixture_root / "compare" / lang / f"{from_rev}_{to_rev}.json"
        if not path.is_file():
            return UNAVAILABLE_DIFF
        try:
            body = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            logger.warning("bad compare fixture %s", path)
            return UNAVAILABLE_DIFF
        return parse_compare_response(from_rev, to_rev, body)

    def _fetch_http(self, lang: str, from_rev: int, to_rev: int) -> RevisionDiff:
        if self._session is None:
            import requests

            self._session = requests.Session()
        try:
            resp = self._session.get(compare_url(lang, from_rev, to_rev), timeout=10)
            resp.raise_for_status()
            return parse_compare_response(from_rev, to_rev, resp.json())
        except Exception:
            logger.warning("compare fetch failed for %s %s->%s", lang, from_rev, to_rev)
            return UNAVAILABLE_DIFF

"""Synthetic wire-line corpus for parser round-trip tests."""

from __future__ import annotations

import random

TITLE_WORDS = [
    "River", "Meteor", "Election", "Pope", "Earthquake", "Final",
    "Синод", "Überfall", "東京", "Qala", "Ñandú", "Smörgåsbord",
]
COMMENT_WORDS = [
    "typo", "added source", "rv vandalism", "infobox", "cat",
    "new section", "*", "see talk", "++", "(minor)", "déjà vu",
]
EDITORS = ["Johanna-Hypatia", "Alice", "Bob42", "Ék", "203.0.113.9", "WikiFan"]
LANGS = ["en", "ru", "de", "fr", "ja", "pt"]


def generate_line(rng: random.Random) -> tuple[str, str]:
    """Return (channel, payload) following the documented wire grammar."""
    lang = rng.choice(LANGS)
    title = " ".join(rng.sample(TITLE_WORDS, rng.randint(1, 3)))
    diff = rng.randint(1, 10**9)
    oldid = rng.randint(1, 10**9)
    url = f"http://{lang}.wikipedia.org/w/index.php?diff={diff}&oldid={oldid}"
    editor = rng.choice(EDITORS)
    delta = rng.randint(-5000, 5000)
    comment = " ".join(rng.choices(COMMENT_WORDS, k=rng.randint(0, 5)))
    payload = f"[[{title}]] {url} * {editor} * ({delta:+d}) {comment}"
    return f"#{lang}.wikipedia", payload

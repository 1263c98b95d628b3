"""Intent rule table: pattern matching shared by the query mapper and the
plan translator. Rules live in a JSON data file (see docs/formats.md) so the
vocabulary is editable without touching code."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_STOPWORDS = {
    "a", "an", "and", "are", "as", "at", "be", "can", "could", "do", "does",
    "for", "from", "generate", "give", "happen", "happens", "has", "have",
    "in", "is", "it", "me", "of", "often", "on", "or", "our", "please",
    "show", "that", "the", "their", "them", "there", "these", "this", "to",
    "us", "was", "we", "were", "what", "which", "will", "with", "would",
    "you", "your", "available", "draw", "plot", "chart", "country",
}

_WORD_RE = re.compile(r"[a-z0-9]+")
_INT_RE = re.compile(r"\b(\d+)\b")


@dataclass(frozen=True)
class IntentRule:
    intent: str
    patterns: tuple[str, ...]
    data_need: str
    query_need: str


def normalize(text: str) -> str:
    return " ".join(_WORD_RE.findall(text.lower()))


def load_rules(path: str | Path | None = None) -> list[IntentRule]:
    if path is None:
        raw = resources.files("datadesk.pipeline").joinpath("intent_rules.json").read_text("utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    rules = json.loads(raw)
    return [
        IntentRule(r["intent"], tuple(r["patterns"]), r["data_need"], r["query_need"])
        for r in rules
    ]


def match_intent(text: str, rules: list[IntentRule]) -> IntentRule | None:
    """First rule (in file order) with a pattern contained in the text."""
    normalized = normalize(text)
    padded = f" {normalized} "
    for rule in rules:
        for pattern in rule.patterns:
            if f" {normalize(pattern)} " in padded or normalize(pattern) in normalized:
                return rule
    return None


def extract_topic(text: str, rule: IntentRule, limit: int = 6) -> str:
    """Content words of the query minus stopwords and the rule's trigger words."""
    triggers = {w for p in rule.patterns for w in normalize(p).split()}
    seen: list[str] = []
    for word in normalize(text).split():
        if word in _STOPWORDS or word in triggers or word.isdigit():
            continue
        if word not in seen:
            seen.append(word)
    return " ".join(seen[:limit]) or "records"


def extract_k(text: str, default: int = 3) -> int:
    """First integer mentioned in the text, else the default cluster count."""
    match = _INT_RE.search(text)
    if match:
        k = int(match.group(1))
        if k >= 1:
            return k
    return default

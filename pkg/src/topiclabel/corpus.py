"""Article ingestion, filtering and title handling.

The corpus arrives as line-delimited JSON records, one article per line:

    {"id": 7, "title": "Financial crisis", "text": "...", "outlinks": [3, 9]}

Tokenisation here is deliberately rule-based so every downstream count is
reproducible: lowercase, split on whitespace, then peel punctuation off the
edges of each chunk.  Internal periods and hyphens stay put, and a trailing
period is kept when the chunk already contains one (so "u.s." survives as a
single token).
"""

from __future__ import annotations

import json
import re
import string
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import FormatError, names_file

DOC_EMBEDDING = "doc_embedding"
WORD_EMBEDDING = "word_embedding"

DISAMBIGUATION_SUFFIX = "(disambiguation)"

_PUNCT = frozenset(string.punctuation)
_WHITESPACE = re.compile(r"\s+")
_TRAILING_PAREN = re.compile(r"\s*\([^()]*\)\s*$")


@dataclass
class Article:
    id: int
    title: str
    body_tokens: list[str]
    outlinks: frozenset[int] = frozenset()


@dataclass
class TitleLexicon:
    """Normalized titles mapped to the articles they came from.

    A title may map to several article ids when parenthesis stripping merges
    ambiguous titles ("democratic party (united states)" and "(australia)"
    both become "democratic party").
    """

    entries: dict[str, set[int]]
    max_title_words: int = 4
    _phrases: set[tuple[str, ...]] | None = field(default=None, repr=False)

    def __contains__(self, label: str) -> bool:
        return label in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def article_ids(self, label: str) -> set[int]:
        return self.entries[label]

    def phrases(self) -> set[tuple[str, ...]]:
        """Multi-word titles as token tuples, for greedy collapsing."""
        if self._phrases is None:
            self._phrases = {
                tuple(words) for key in self.entries if len(words := key.split()) > 1
            }
        return self._phrases


def tokenize(text: str) -> list[str]:
    """Lowercase and split text into tokens.

    Punctuation is detached from the edges of whitespace-separated chunks,
    each detached character becoming its own token; interior punctuation is
    never touched.  Deterministic by construction: no external models.
    """
    tokens: list[str] = []
    for chunk in text.lower().split():
        _split_chunk(chunk, tokens)
    return tokens


def _split_chunk(chunk: str, out: list[str]) -> None:
    start = 0
    end = len(chunk)
    while start < end and chunk[start] in _PUNCT:
        out.append(chunk[start])
        start += 1
    trailing: list[str] = []
    while end > start and chunk[end - 1] in _PUNCT:
        ch = chunk[end - 1]
        if ch == "." and "." in chunk[start : end - 1]:
            break  # abbreviation like "u.s." keeps its final period
        trailing.append(ch)
        end -= 1
    if end > start:
        out.append(chunk[start:end])
    out.extend(reversed(trailing))


def is_disambiguation(title: str) -> bool:
    return title.strip().lower().endswith(DISAMBIGUATION_SUFFIX)


def filter_articles(
    articles: Iterable[Article], min_body_tokens: int = 40
) -> Iterator[Article]:
    """Drop articles with short bodies and disambiguation pages.

    The length cutoff is strict: a body of exactly min_body_tokens survives.
    Order is preserved and the filter is idempotent.
    """
    for article in articles:
        if len(article.body_tokens) < min_body_tokens:
            continue
        if is_disambiguation(article.title):
            continue
        yield article


def normalize_title(title: str, strip_parenthetical: bool = False) -> str:
    """Lowercase a title, optionally removing one trailing "(...)" span."""
    normalized = _WHITESPACE.sub(" ", title.strip().lower())
    if strip_parenthetical:
        normalized = _TRAILING_PAREN.sub("", normalized).strip()
    return normalized


def build_title_lexicon(
    articles: Iterable[Article], variant: str, max_title_words: int = 4
) -> TitleLexicon:
    """Collect usable titles from an already-filtered article stream.

    The doc_embedding variant keeps full lowercase titles; the
    word_embedding variant first strips one trailing parenthesized span
    (never interior ones) and drops any title still containing parentheses.
    The word-count cap applies to the normalized form, so a stripped title
    that shrinks to four words or fewer is kept.
    """
    if variant not in (DOC_EMBEDDING, WORD_EMBEDDING):
        raise ValueError(f"unknown lexicon variant: {variant!r}")
    strip = variant == WORD_EMBEDDING
    entries: dict[str, set[int]] = {}
    for article in articles:
        key = normalize_title(article.title, strip_parenthetical=strip)
        if not key:
            continue
        if strip and ("(" in key or ")" in key):
            continue
        if len(key.split()) > max_title_words:
            continue
        entries.setdefault(key, set()).add(article.id)
    return TitleLexicon(entries=entries, max_title_words=max_title_words)


def collapse_titles(body_tokens: Sequence[str], lexicon: TitleLexicon) -> list[str]:
    """Replace title occurrences with single underscore-joined tokens.

    Scans left to right, taking the longest lexicon phrase that starts at
    the current position; matches never overlap.  Single-word titles are
    left alone since they already exist as ordinary tokens.
    """
    phrases = lexicon.phrases()
    longest = lexicon.max_title_words
    out: list[str] = []
    i = 0
    n = len(body_tokens)
    while i < n:
        matched = 0
        for length in range(min(longest, n - i), 1, -1):
            if tuple(body_tokens[i : i + length]) in phrases:
                matched = length
                break
        if matched:
            out.append("_".join(body_tokens[i : i + matched]))
            i += matched
        else:
            out.append(body_tokens[i])
            i += 1
    return out


def collapsed_token(label: str) -> str:
    """The in-text token form of a normalized title."""
    return "_".join(label.split())


# ---------------------------------------------------------------------------
# File formats


def parse_article_record(line: str, lineno: int = 0) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {lineno}: invalid JSON ({exc})") from exc
    for key in ("id", "title", "text"):
        if key not in record:
            raise FormatError(f"line {lineno}: article record missing {key!r}")
    return record


def article_from_record(record: dict) -> Article:
    return Article(
        id=int(record["id"]),
        title=str(record["title"]),
        body_tokens=tokenize(str(record["text"])),
        outlinks=frozenset(int(x) for x in record.get("outlinks", [])),
    )


@names_file
def read_articles(path) -> list[Article]:
    """Load and tokenize every article record in a JSONL corpus file."""
    articles = []
    seen: set[int] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            article = article_from_record(parse_article_record(line, lineno))
            if article.id in seen:
                raise FormatError(f"line {lineno}: duplicate article id {article.id}")
            seen.add(article.id)
            articles.append(article)
    return articles


def write_lexicon(lexicon: TitleLexicon, path) -> None:
    """Two columns: normalized title TAB comma-separated article ids."""
    with open(path, "w", encoding="utf-8") as handle:
        for key in sorted(lexicon.entries):
            ids = ",".join(str(i) for i in sorted(lexicon.entries[key]))
            handle.write(f"{key}\t{ids}\n")


@names_file
def read_lexicon(path, max_title_words: int = 4) -> TitleLexicon:
    entries: dict[str, set[int]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                key, ids = line.split("\t")
                entries[key] = {int(x) for x in ids.split(",")}
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad lexicon row") from exc
    return TitleLexicon(entries=entries, max_title_words=max_title_words)

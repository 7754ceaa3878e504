"""Candidate label generation: scoring titles against topics.

A title's relevance to a topic is the mean cosine between the title's
embedding and the word embeddings of the topic terms.  The document model
and the word model each contribute a relevance; the combined score of a
title is their sum, computed over the union of the two models' top-k lists.
Ties are always broken lexicographically so rankings are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .corpus import collapsed_token
from .embeddings import DOCUMENT, EmbeddingTable, cosine
from .errors import (
    DegenerateVectorError,
    FormatError,
    MissingTermsError,
    UnknownTitleError,
    names_file,
)

DOC_MODEL = "doc_model"
WORD_MODEL = "word_model"

MEAN = "mean"
WEIGHTED = "weighted"
CENTROID = "centroid"


@dataclass
class Topic:
    id: str
    domain: str
    terms: list[str]
    term_probs: list[float] | None = None

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError(f"topic {self.id!r} has no terms")
        self.terms = [t.lower() for t in self.terms]
        if self.term_probs is not None:
            if len(self.term_probs) != len(self.terms):
                raise ValueError(f"topic {self.id!r}: probs do not match terms")
            if any(p <= 0 for p in self.term_probs):
                raise ValueError(f"topic {self.id!r}: term probs must be positive")


@dataclass
class CandidateLabel:
    label: str
    rel_d2v: float
    rel_w2v: float
    rel_combined: float
    sources: frozenset[str]


def truncate_terms(topic: Topic, n: int) -> Topic:
    probs = topic.term_probs[:n] if topic.term_probs is not None else None
    return replace(topic, terms=topic.terms[:n], term_probs=probs)


def _title_key(title: str, title_table: EmbeddingTable) -> str:
    # Document tables are keyed by the normalized title itself; word tables
    # by its collapsed in-text token.
    if title_table.kind == DOCUMENT:
        return title
    return collapsed_token(title)


def _present_terms(
    topic: Topic, word_table: EmbeddingTable, weighted: bool
) -> tuple[list[str], list[float] | None]:
    """Topic terms found in the vocabulary; absent terms shrink the mean."""
    if weighted and topic.term_probs is None:
        raise MissingTermsError(f"topic {topic.id!r} carries no term probabilities")
    terms = []
    probs = [] if weighted else None
    for i, term in enumerate(topic.terms):
        if term in word_table:
            terms.append(term)
            if weighted:
                probs.append(topic.term_probs[i])  # type: ignore[index]
    if not terms:
        raise MissingTermsError(
            f"no term of topic {topic.id!r} is in the {word_table.kind} vocabulary"
        )
    return terms, probs


def relevance(
    title: str,
    topic: Topic,
    title_table: EmbeddingTable,
    word_table: EmbeddingTable,
    aggregate: str = MEAN,
) -> float:
    """Relevance of one title to a topic under one embedding model."""
    key = _title_key(title, title_table)
    try:
        title_vec = title_table.vector(key)
    except KeyError:
        raise UnknownTitleError(
            f"title {title!r} (key {key!r}) not in the {title_table.kind} table"
        ) from None
    terms, probs = _present_terms(topic, word_table, aggregate == WEIGHTED)
    if aggregate == CENTROID:
        centroid = np.mean([word_table.vector(t) for t in terms], axis=0)
        return cosine(title_vec, centroid)
    cosines = [cosine(title_vec, word_table.vector(t)) for t in terms]
    if aggregate == WEIGHTED:
        # Rescaling weights by the first one leaves the weighted mean
        # unchanged but makes uniform weights exactly 1.0, so the uniform
        # case reduces to the plain mean bit for bit.
        weights = [p / probs[0] for p in probs]  # type: ignore[index]
        total = sum(weights)
        return float(sum(c * w for c, w in zip(cosines, weights)) / total)
    if aggregate != MEAN:
        raise ValueError(f"unknown aggregate {aggregate!r}")
    return float(sum(cosines) / len(cosines))


def rel_d2v(
    title: str, topic: Topic, doc_table: EmbeddingTable, word_table: EmbeddingTable
) -> float:
    """Document-model relevance: mean cosine of doc vector vs term vectors."""
    return relevance(title, topic, doc_table, word_table)


def rel_w2v(title: str, topic: Topic, word_table: EmbeddingTable) -> float:
    """Word-model relevance: the title side is its collapsed word vector."""
    return relevance(title, topic, word_table, word_table)


def rel_weighted(
    title: str,
    topic: Topic,
    title_table: EmbeddingTable,
    word_table: EmbeddingTable,
) -> float:
    """Term-probability-weighted variant of the mean-cosine relevance."""
    return relevance(title, topic, title_table, word_table, WEIGHTED)


def rel_centroid(
    title: str,
    topic: Topic,
    title_table: EmbeddingTable,
    word_table: EmbeddingTable,
) -> float:
    """Cosine between the title and the centroid of the topic terms."""
    return relevance(title, topic, title_table, word_table, CENTROID)


def score_titles(
    titles: Sequence[str],
    title_table: EmbeddingTable,
    topic: Topic,
    word_table: EmbeddingTable,
) -> np.ndarray:
    """Mean-cosine relevance of many titles at once (vectorized scan)."""
    terms, _ = _present_terms(topic, word_table, False)
    term_matrix = np.stack([word_table.vector(t) for t in terms])
    term_norms = np.linalg.norm(term_matrix, axis=1)
    if np.any(term_norms == 0.0):
        bad = terms[int(np.argmin(term_norms))]
        raise DegenerateVectorError(f"zero-norm vector for topic term {bad!r}")
    rows = []
    for title in titles:
        key = _title_key(title, title_table)
        try:
            rows.append(title_table.vector(key))
        except KeyError:
            raise UnknownTitleError(
                f"title {title!r} (key {key!r}) not in the {title_table.kind} table"
            ) from None
    title_matrix = np.stack(rows)
    title_norms = np.linalg.norm(title_matrix, axis=1)
    if np.any(title_norms == 0.0):
        bad = titles[int(np.argmin(title_norms))]
        raise DegenerateVectorError(f"zero-norm vector for title {bad!r}")
    sims = (title_matrix / title_norms[:, None]) @ (term_matrix / term_norms[:, None]).T
    return sims.mean(axis=1)


def _top_k(scores: Mapping[str, float], k: int) -> list[str]:
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [label for label, _ in ordered[:k]]


def generate_candidates(
    topic: Topic,
    doc_table: EmbeddingTable,
    doc_word_table: EmbeddingTable,
    word_table: EmbeddingTable,
    doc_titles: Sequence[str],
    word_titles: Sequence[str],
    k_per_source: int = 100,
    out_k: int = 19,
) -> list[CandidateLabel]:
    """Rank label candidates for one topic by combined relevance.

    Takes the top k_per_source titles under each model, then scores every
    member of the union under both models where possible; the combined
    score is the sum of the available relevances.  Returns the best out_k
    by combined score, descending, ties broken by label.
    """
    if k_per_source < 1:
        raise ValueError("k_per_source must be >= 1")
    doc_scores: dict[str, float] = {}
    word_scores: dict[str, float] = {}
    if doc_titles:
        doc_scores = dict(
            zip(doc_titles, score_titles(doc_titles, doc_table, topic, doc_word_table))
        )
    if word_titles:
        word_scores = dict(
            zip(word_titles, score_titles(word_titles, word_table, topic, word_table))
        )
    union = sorted(
        set(_top_k(doc_scores, k_per_source)) | set(_top_k(word_scores, k_per_source))
    )
    candidates = []
    for label in union:
        sources = set()
        d = doc_scores.get(label)
        if d is None:
            try:
                d = rel_d2v(label, topic, doc_table, doc_word_table)
            except UnknownTitleError:
                d = 0.0
            else:
                sources.add(DOC_MODEL)
        else:
            sources.add(DOC_MODEL)
        w = word_scores.get(label)
        if w is None:
            try:
                w = rel_w2v(label, topic, word_table)
            except UnknownTitleError:
                w = 0.0
            else:
                sources.add(WORD_MODEL)
        else:
            sources.add(WORD_MODEL)
        candidates.append(
            CandidateLabel(label, d, w, d + w, frozenset(sources))
        )
    candidates.sort(key=lambda c: (-c.rel_combined, c.label))
    return candidates[:out_k]


# ---------------------------------------------------------------------------
# File formats


@names_file
def read_topics(path) -> list[Topic]:
    """One topic per JSON line: id, domain, terms, optional term_probs."""
    topics = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid JSON ({exc})") from exc
            for key in ("id", "domain", "terms"):
                if key not in record:
                    raise FormatError(f"line {lineno}: topic record missing {key!r}")
            topic_id = str(record["id"])
            if topic_id in seen:
                raise FormatError(f"line {lineno}: duplicate topic id {topic_id!r}")
            seen.add(topic_id)
            topics.append(
                Topic(
                    id=topic_id,
                    domain=str(record["domain"]),
                    terms=[str(t) for t in record["terms"]],
                    term_probs=(
                        [float(p) for p in record["term_probs"]]
                        if record.get("term_probs") is not None
                        else None
                    ),
                )
            )
    return topics


CANDIDATE_COLUMNS = ("topic_id", "rank", "label", "rel_d2v", "rel_w2v", "rel_combined", "sources")


def write_candidates(candidates: Mapping[str, Sequence[CandidateLabel]], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\t".join(CANDIDATE_COLUMNS) + "\n")
        for topic_id in sorted(candidates):
            for rank, cand in enumerate(candidates[topic_id], start=1):
                handle.write(
                    "%s\t%d\t%s\t%.10g\t%.10g\t%.10g\t%s\n"
                    % (
                        topic_id,
                        rank,
                        cand.label,
                        cand.rel_d2v,
                        cand.rel_w2v,
                        cand.rel_combined,
                        ",".join(sorted(cand.sources)),
                    )
                )


@names_file
def read_candidates(path) -> dict[str, list[CandidateLabel]]:
    out: dict[str, list[CandidateLabel]] = {}
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n").split("\t")
        if tuple(header) != CANDIDATE_COLUMNS:
            raise FormatError(f"unexpected candidate table header: {header}")
        for lineno, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(CANDIDATE_COLUMNS):
                raise FormatError(f"line {lineno}: expected {len(CANDIDATE_COLUMNS)} columns")
            topic_id, _, label, d, w, combined, sources = parts
            out.setdefault(topic_id, []).append(
                CandidateLabel(
                    label,
                    float(d),
                    float(w),
                    float(combined),
                    frozenset(s for s in sources.split(",") if s),
                )
            )
    return out

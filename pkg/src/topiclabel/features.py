"""Reranking features for (topic, candidate-label) pairs.

Four features feed the supervised reranker: the candidate's rank under the
letter-trigram cosine (which doubles as the unsupervised baseline ranking),
the PageRank of its source article, the lexical overlap with the topic
terms, and its word count.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .corpus import Article, TitleLexicon
from .errors import FormatError, NoTrigramsError, UnknownLabelError, names_file
from .generation import Topic

logger = logging.getLogger(__name__)

FEATURE_NAMES = ("letter_trigram_rank", "pagerank", "topic_overlap", "num_words")


@dataclass
class FeatureVector:
    letter_trigram_rank: int
    pagerank: float
    topic_overlap: int
    num_words: int

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.letter_trigram_rank, self.pagerank, self.topic_overlap, self.num_words],
            dtype=np.float64,
        )


@dataclass
class LinkGraph:
    """Directed article graph; edge endpoints are always nodes."""

    nodes: list[int]
    edges: dict[int, tuple[int, ...]]

    @classmethod
    def from_articles(cls, articles: Iterable[Article]) -> "LinkGraph":
        articles = list(articles)
        known = {a.id for a in articles}
        edges = {
            a.id: tuple(sorted(t for t in a.outlinks if t in known)) for a in articles
        }
        return cls(nodes=sorted(known), edges=edges)

    def to_csr(self) -> tuple[np.ndarray, np.ndarray, dict[int, int]]:
        position = {node: i for i, node in enumerate(self.nodes)}
        indptr = np.zeros(len(self.nodes) + 1, dtype=np.int64)
        targets: list[int] = []
        for i, node in enumerate(self.nodes):
            for t in self.edges.get(node, ()):
                targets.append(position[t])
            indptr[i + 1] = len(targets)
        return indptr, np.array(targets, dtype=np.int32), position


# ---------------------------------------------------------------------------
# Letter trigrams


def _words(label: str) -> list[str]:
    # Collapsed tokens count their underscore-joined parts as words.
    return label.replace("_", " ").split()


def trigram_distribution(strings: Sequence[str]) -> dict[str, float]:
    """Maximum-likelihood distribution over letter trigrams.

    Each string contributes its own contiguous 3-character substrings;
    strings are never concatenated, so no trigram spans two of them.
    """
    counts: dict[str, int] = {}
    total = 0
    for s in strings:
        for i in range(len(s) - 2):
            gram = s[i : i + 3]
            counts[gram] = counts.get(gram, 0) + 1
            total += 1
    if total == 0:
        raise NoTrigramsError("every string is shorter than 3 characters")
    return {gram: c / total for gram, c in counts.items()}


def _distribution_cosine(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    dot = sum(v * q[k] for k, v in p.items() if k in q)
    np_ = math.sqrt(sum(v * v for v in p.values()))
    nq = math.sqrt(sum(v * v for v in q.values()))
    return dot / (np_ * nq)


def letter_trigram_similarity(label: str, topic: Topic) -> float:
    """Cosine between label and topic-term trigram distributions.

    A label whose words are all shorter than 3 characters scores 0 rather
    than failing, so ranking stays total.
    """
    topic_dist = trigram_distribution(topic.terms)
    try:
        label_dist = trigram_distribution(_words(label))
    except NoTrigramsError:
        return 0.0
    return _distribution_cosine(label_dist, topic_dist)


def unsupervised_rank(labels: Sequence[str], topic: Topic) -> list[str]:
    """Labels ordered by trigram similarity; position+1 is the rank feature."""
    scored = [(label, letter_trigram_similarity(label, topic)) for label in labels]
    scored.sort(key=lambda ls: (-ls[1], ls[0]))
    return [label for label, _ in scored]


# ---------------------------------------------------------------------------
# PageRank


def pagerank(
    graph: LinkGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> dict[int, float]:
    """Power iteration with uniform teleport and dangling redistribution.

    Non-convergence within max_iter is logged with the final residual; the
    last iterate is still returned.
    """
    if not graph.nodes:
        raise ValueError("pagerank of an empty graph")
    indptr, targets, position = graph.to_csr()
    scores, iterations, residual = kernels.pagerank_power(
        indptr, targets, damping, tol, max_iter
    )
    if residual >= tol:
        logger.warning(
            "pagerank did not converge in %d iterations (L1 residual %.3e)",
            iterations, residual,
        )
    return {node: float(scores[i]) for node, i in position.items()}


def title_pagerank(
    label: str, lexicon: TitleLexicon, scores: Mapping[int, float]
) -> float:
    """Score of a label; merged ambiguous titles take their best article."""
    if label not in lexicon:
        raise UnknownLabelError(f"label {label!r} not in the title lexicon")
    return max(scores[a] for a in lexicon.article_ids(label))


# ---------------------------------------------------------------------------
# Lexical features


def topic_overlap(label: str, topic: Topic) -> int:
    """How many distinct label words appear among the topic terms."""
    terms = {t.lower() for t in topic.terms}
    return len({w.lower() for w in _words(label)} & terms)


def num_words(label: str) -> int:
    words = _words(label)
    if not words:
        raise ValueError(f"empty label {label!r}")
    return len(words)


def compute_features(
    topic: Topic,
    labels: Sequence[str],
    lexicon: TitleLexicon,
    pagerank_scores: Mapping[int, float],
) -> dict[str, FeatureVector]:
    """All four features for each candidate label of one topic."""
    ranked = unsupervised_rank(labels, topic)
    ranks = {label: i + 1 for i, label in enumerate(ranked)}
    return {
        label: FeatureVector(
            letter_trigram_rank=ranks[label],
            pagerank=title_pagerank(label, lexicon, pagerank_scores),
            topic_overlap=topic_overlap(label, topic),
            num_words=num_words(label),
        )
        for label in labels
    }


# ---------------------------------------------------------------------------
# File formats


def write_pagerank(scores: Mapping[int, float], path) -> None:
    """Two columns: article id, score."""
    with open(path, "w", encoding="utf-8") as handle:
        for node in sorted(scores):
            handle.write("%d\t%.17g\n" % (node, scores[node]))


@names_file
def read_pagerank(path) -> dict[int, float]:
    scores: dict[int, float] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                node, score = line.split()
                scores[int(node)] = float(score)
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad pagerank row") from exc
    return scores


FEATURE_COLUMNS = ("topic_id", "label") + FEATURE_NAMES


def write_features(
    features: Mapping[str, Mapping[str, FeatureVector]], path
) -> None:
    """Tabular file keyed by (topic id, label)."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\t".join(FEATURE_COLUMNS) + "\n")
        for topic_id in sorted(features):
            per_topic = features[topic_id]
            for label in sorted(per_topic):
                fv = per_topic[label]
                handle.write(
                    "%s\t%s\t%d\t%.17g\t%d\t%d\n"
                    % (
                        topic_id, label, fv.letter_trigram_rank, fv.pagerank,
                        fv.topic_overlap, fv.num_words,
                    )
                )


@names_file
def read_features(path) -> dict[str, dict[str, FeatureVector]]:
    out: dict[str, dict[str, FeatureVector]] = {}
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n").split("\t")
        if tuple(header) != FEATURE_COLUMNS:
            raise FormatError(f"unexpected feature table header: {header}")
        for lineno, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(FEATURE_COLUMNS):
                raise FormatError(f"line {lineno}: expected {len(FEATURE_COLUMNS)} columns")
            topic_id, label, rank, pr, overlap, words = parts
            out.setdefault(topic_id, {})[label] = FeatureVector(
                letter_trigram_rank=int(rank),
                pagerank=float(pr),
                topic_overlap=int(overlap),
                num_words=int(words),
            )
    return out

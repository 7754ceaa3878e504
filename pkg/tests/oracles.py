"""Independent reference implementations used to check the library.

Everything here is deliberately written the slow, obvious way — dense
linear algebra, exhaustive enumeration, Counter arithmetic — and shares no
code with the package internals it verifies.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np


def dense_pagerank(n: int, edges: list[tuple[int, int]], damping: float) -> np.ndarray:
    """Solve the PageRank fixed point as a dense linear system.

    Builds the full Google matrix (dangling rows replaced by uniform rows,
    teleport mixed in) and solves pi G = pi with sum(pi) = 1 directly.
    """
    S = np.zeros((n, n))
    out_degree = Counter(src for src, _ in edges)
    for src, dst in edges:
        S[src, dst] += 1.0 / out_degree[src]
    for i in range(n):
        if out_degree[i] == 0:
            S[i, :] = 1.0 / n
    G = damping * S + (1.0 - damping) / n
    # pi (G - I) = 0 with the normalization constraint replacing one column
    A = (G - np.eye(n)).T
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    return np.linalg.solve(A, b)


def trigram_cosine(label_words: list[str], topic_terms: list[str]) -> float:
    """Letter-trigram cosine computed with Counter arithmetic."""

    def grams(strings: list[str]) -> Counter:
        counts: Counter = Counter()
        for s in strings:
            counts.update(s[i : i + 3] for i in range(len(s) - 2))
        return counts

    a = grams(label_words)
    b = grams(topic_terms)
    ta = sum(a.values())
    tb = sum(b.values())
    if ta == 0 or tb == 0:
        raise ValueError("no trigrams")
    keys = set(a) | set(b)
    va = np.array([a.get(k, 0) / ta for k in sorted(keys)])
    vb = np.array([b.get(k, 0) / tb for k in sorted(keys)])
    return float(va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb)))


def fsum_cosine(a, b) -> float:
    """Cosine via exact-summation dot products."""
    dot = math.fsum(x * y for x, y in zip(a, b))
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(y * y for y in b))
    return dot / (na * nb)


def combined_label_ranking(
    topic_terms: list[str],
    doc_vectors: dict[str, np.ndarray],
    d2v_word_vectors: dict[str, np.ndarray],
    w2v_word_vectors: dict[str, np.ndarray],
    doc_titles: list[str],
    word_titles: list[str],
    k_per_source: int,
) -> list[tuple[str, float]]:
    """Exhaustive enumeration of the combined-relevance ranking.

    Scores every title under both models with fsum cosines, takes the two
    top-k lists, and sums both relevances over the union, breaking all ties
    lexicographically.  Mirrors the contract, not the implementation.
    """

    def mean_rel(title_vec, word_vectors) -> float | None:
        cosines = [
            fsum_cosine(title_vec, word_vectors[t])
            for t in topic_terms
            if t in word_vectors
        ]
        if not cosines:
            return None
        return math.fsum(cosines) / len(cosines)

    d_scores = {}
    for title in doc_titles:
        rel = mean_rel(doc_vectors[title], d2v_word_vectors)
        if rel is not None:
            d_scores[title] = rel
    w_scores = {}
    for title in word_titles:
        token = "_".join(title.split())
        rel = mean_rel(w2v_word_vectors[token], w2v_word_vectors)
        if rel is not None:
            w_scores[title] = rel

    def top(scores):
        return [
            t for t, _ in sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:k_per_source]
        ]

    union = sorted(set(top(d_scores)) | set(top(w_scores)))
    combined = []
    for title in union:
        d = d_scores.get(title)
        if d is None and title in doc_vectors:
            d = mean_rel(doc_vectors[title], d2v_word_vectors)
        w = w_scores.get(title)
        if w is None and "_".join(title.split()) in w2v_word_vectors:
            w = mean_rel(w2v_word_vectors["_".join(title.split())], w2v_word_vectors)
        combined.append((title, (d or 0.0) + (w or 0.0)))
    combined.sort(key=lambda kv: (-kv[1], kv[0]))
    return combined


def leftmost_longest(tokens: list[str], phrases: set[tuple[str, ...]], max_len: int) -> list[str]:
    """Recursive statement of the greedy collapse rule."""
    if not tokens:
        return []
    for length in range(min(max_len, len(tokens)), 1, -1):
        if tuple(tokens[:length]) in phrases:
            return ["_".join(tokens[:length])] + leftmost_longest(
                tokens[length:], phrases, max_len
            )
    return [tokens[0]] + leftmost_longest(tokens[1:], phrases, max_len)


def classic_dcg(gains: list[float]) -> float:
    """First gain undiscounted, then gain/log2(rank)."""
    return math.fsum(
        g if i == 1 else g / math.log2(i) for i, g in enumerate(gains, start=1)
    )


def gain_equivalent_prefix(system: list[float], ideal: list[float], k: int) -> bool:
    """Whether the top-k gains match the ideal top-k under the classic
    discount profile (ranks sharing a discount may swap freely)."""
    discounts = [1.0 if i == 1 else 1.0 / math.log2(i) for i in range(1, k + 1)]
    groups: dict[float, tuple[Counter, Counter]] = {}
    for d, s, i in zip(discounts, system[:k], ideal[:k]):
        sys_counts, ideal_counts = groups.setdefault(d, (Counter(), Counter()))
        sys_counts[s] += 1
        ideal_counts[i] += 1
    return all(sc == ic for sc, ic in groups.values())
